#include <iostream>

#include <CLI11.hpp>

#include "fbe/dispatch.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Free-boundary elastodynamics in flattened coordinates"};
  app.require_subcommand(1);

  fbe::CommandSpec cmd;
  std::uint64_t seed = 0;
  auto common = [&](CLI::App* s) {
    s->add_option("--config", cmd.config_path, "JSON config file")->check(CLI::ExistingFile);
    s->add_option("--output-dir,-o", cmd.output_dir, "where outputs go");
    s->add_option("--seed", seed, "seed for randomized suites (default 0)");
  };

  auto* run = app.add_subcommand("run", "integrate the system from the configured initial data");
  common(run);
  auto* verify = app.add_subcommand("verify", "verify exact identities");
  common(verify);
  verify->add_option("target", cmd.verify_target, "what to verify")->check(CLI::IsMember({"agu"}))->required();
  auto* galerkin = app.add_subcommand("galerkin", "projected linearized system with m modes");
  common(galerkin);
  galerkin->add_option("--m", cmd.m, "number of tensor modes (1..64)");
  galerkin->add_option("--T", cmd.T, "final time");
  auto* picard = app.add_subcommand("picard", "Picard iteration with difference energies");
  common(picard);
  picard->add_option("--n-max", cmd.n_max, "number of iterates");
  picard->add_option("--T", cmd.T, "time horizon");
  auto* kappa = app.add_subcommand("kappa-study", "pairwise distances of trajectories as kappa shrinks");
  common(kappa);
  auto* norms = app.add_subcommand("norms", "energies, constraints and norms of the initial data");
  common(norms);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    std::cerr << R"({"status":"error","error":{"kind":"usage","message":)" << nlohmann::json(e.what()).dump()
              << R"(},"exit_code":4})" << '\n';
    return fbe::exit_config;
  }

  if (run->parsed()) cmd.sub = fbe::Subcommand::run;
  if (verify->parsed()) cmd.sub = fbe::Subcommand::verify;
  if (galerkin->parsed()) cmd.sub = fbe::Subcommand::galerkin;
  if (picard->parsed()) cmd.sub = fbe::Subcommand::picard;
  if (kappa->parsed()) cmd.sub = fbe::Subcommand::kappa_study;
  if (norms->parsed()) cmd.sub = fbe::Subcommand::norms;
  for (auto* s : {run, verify, galerkin, picard, kappa, norms})
    if (s->parsed() && s->count("--seed")) cmd.seed = seed;

  const auto res = fbe::dispatch(cmd, std::cout);
  if (res.exit_code != fbe::exit_ok) std::cerr << res.record.dump() << '\n';
  return res.exit_code;
}
