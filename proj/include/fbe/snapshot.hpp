#pragma once

#include <string>
#include <vector>

#include "fbe/grid.hpp"
#include "fbe/state.hpp"

namespace fbe {

struct SnapshotHeader {
  int nx = 0;
  int ny = 0;
  int nz = 0;
  double b = 1.0;
  int arity = 1;
  double time = 0.0;
};

/// Raw little-endian doubles at `stem`.bin (components one after another,
/// each x1-fastest) plus `stem`.json with the header.
void write_field(const std::string& stem, const Grid& grid, double time, const std::vector<const double*>& components,
                 std::size_t component_size);
void write_field(const std::string& stem, const Grid& grid, double time, const VolumeField& f);
void write_field(const std::string& stem, const Grid& grid, double time, const SurfaceField& f);
void write_field(const std::string& stem, const Grid& grid, double time, const VectorField& f);

/// Reads the header and the payload back.
std::vector<double> read_field(const std::string& stem, SnapshotHeader& header);

/// One file pair per field (v, F1, F2, F3, q, psi, dtpsi) plus `stem`_manifest.json.
void write_state(const std::string& stem, const Grid& grid, const Params& params, const State& s);
State read_state(const std::string& stem, const Grid& grid);

}  // namespace fbe
