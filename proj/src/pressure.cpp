#include "fbe/pressure.hpp"

#include <cmath>
#include <sstream>

namespace fbe {

PressureSolver::PressureSolver(const Discretization& disc, int restart) : disc_(disc), restart_(restart) {
  const int nz = disc.nz();
  const Eigen::MatrixXd& D = disc.cheb_d();
  const Eigen::MatrixXd D2 = D * D;
  std::map<long long, int> seen;
  mode_key_.resize(disc.half_size());
  for (int i2 = 0; i2 < disc.ny(); ++i2)
    for (int i1 = 0; i1 < disc.nx_half(); ++i1) {
      const double k1 = disc.k1_deriv(i1), k2 = disc.k2_deriv(i2);
      const long long ksq = std::llround(k1 * k1 + k2 * k2);
      auto it = seen.find(ksq);
      if (it == seen.end()) {
        Eigen::MatrixXd M = D2 - static_cast<double>(ksq) * Eigen::MatrixXd::Identity(nz, nz);
        M.row(0) = D.row(0);
        M.row(nz - 1).setZero();
        M(nz - 1, nz - 1) = 1.0;
        inverses_.push_back(M.partialPivLu().inverse());
        it = seen.emplace(ksq, static_cast<int>(inverses_.size()) - 1).first;
      }
      mode_key_[i1 + static_cast<std::size_t>(disc.nx_half()) * i2] = it->second;
    }
}

VolumeField PressureSolver::apply(const FlattenedGeometry& geo, const VolumeField& q) const {
  const Discretization& d = disc_;
  const std::size_t S = d.grid().surface_size();
  const int nz = d.nz();
  auto g = d.gradient(q);
  // X = grad^phi q; the horizontal part of div^phi X is summed in spectral space
  VolumeField X1(q.size()), X2(q.size()), X3(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double g3 = g[2][i] / geo.d3phi[i];
    X1[i] = g[0][i] - geo.d1phi[i] * g3;
    X2[i] = g[1][i] - geo.d2phi[i] * g3;
    X3[i] = g3;
  }
  auto c1 = d.forward(X1);
  auto c2 = d.forward(X2);
  const std::size_t h = d.half_size();
  const std::complex<double> I(0.0, 1.0);
  for (int s = 0; s < nz; ++s)
    for (int i2 = 0; i2 < d.ny(); ++i2)
      for (int i1 = 0; i1 < d.nx_half(); ++i1) {
        const std::size_t m = s * h + i1 + static_cast<std::size_t>(d.nx_half()) * i2;
        c1[m] = I * d.k1_deriv(i1) * c1[m] + I * d.k2_deriv(i2) * c2[m];
      }
  VolumeField out = d.inverse_volume(c1);
  auto z1 = d.d3(X1);
  auto z2 = d.d3(X2);
  auto z3 = d.d3(X3);
  for (std::size_t i = 0; i < q.size(); ++i)
    out[i] += (z3[i] - geo.d1phi[i] * z1[i] - geo.d2phi[i] * z2[i]) / geo.d3phi[i];
  for (std::size_t i = 0; i < S; ++i) {
    out[i] = X3[i];
    out[(nz - 1) * S + i] = q[(nz - 1) * S + i];
  }
  return out;
}

VolumeField PressureSolver::precondition(const VolumeField& r) const {
  const Discretization& d = disc_;
  const int nz = d.nz();
  const std::size_t h = d.half_size();
  auto c = d.forward(r);
  Eigen::MatrixXd col(nz, 2), sol(nz, 2);
  for (std::size_t m = 0; m < h; ++m) {
    for (int s = 0; s < nz; ++s) {
      col(s, 0) = c[s * h + m].real();
      col(s, 1) = c[s * h + m].imag();
    }
    sol.noalias() = inverses_[mode_key_[m]] * col;
    for (int s = 0; s < nz; ++s) c[s * h + m] = {sol(s, 0), sol(s, 1)};
  }
  return d.inverse_volume(c);
}

VolumeField PressureSolver::assemble(const PressureProblem& p) const {
  disc_.check(p.rhs);
  disc_.check(p.top_dirichlet);
  disc_.check(p.bottom_neumann);
  VolumeField b = p.rhs;
  set_level(disc_, b, 0, p.bottom_neumann);
  set_level(disc_, b, disc_.nz() - 1, p.top_dirichlet);
  return b;
}

namespace {

double dot(const VolumeField& a, const VolumeField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

PressureResult PressureSolver::solve(const PressureProblem& p, const VolumeField* initial_guess) const {
  if (!p.geom) throw ConfigError("pressure.geom", "missing geometry");
  if (!(p.tol > 0.0)) throw ConfigError("pressure.tol", "tolerance must be > 0");
  const FlattenedGeometry& geo = *p.geom;
  const VolumeField b = assemble(p);
  const double bnorm = std::sqrt(dot(b, b));
  PressureResult res;
  res.q = initial_guess ? *initial_guess : disc_.zeros_volume();
  if (bnorm == 0.0 && !initial_guess) return res;
  const double scale = bnorm > 0.0 ? bnorm : 1.0;

  VolumeField r = b - apply(geo, res.q);
  double rnorm = std::sqrt(dot(r, r));
  int total = 0;
  const int m = restart_;
  while (rnorm / scale > p.tol && total < p.max_iter) {
    std::vector<VolumeField> V;
    std::vector<VolumeField> Z;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    std::vector<double> cs(m), sn(m), g(m + 1, 0.0);
    g[0] = rnorm;
    V.push_back((1.0 / rnorm) * r);
    int j = 0;
    for (; j < m && total < p.max_iter; ++j, ++total) {
      Z.push_back(precondition(V[j]));
      VolumeField w = apply(geo, Z[j]);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = dot(w, V[i]);
        w.axpy(-H(i, j), V[i]);
      }
      // one reorthogonalization pass
      for (int i = 0; i <= j; ++i) {
        const double c = dot(w, V[i]);
        H(i, j) += c;
        w.axpy(-c, V[i]);
      }
      H(j + 1, j) = std::sqrt(dot(w, w));
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = H(j, j) / denom;
      sn[j] = H(j + 1, j) / denom;
      const double hj1 = H(j + 1, j);
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      if (hj1 > 0.0) V.push_back((1.0 / hj1) * w);
      if (std::abs(g[j + 1]) / scale <= p.tol || hj1 == 0.0) {
        ++j;
        ++total;
        break;
      }
    }
    // back substitution
    std::vector<double> y(j, 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int k = i + 1; k < j; ++k) s -= H(i, k) * y[k];
      y[i] = s / H(i, i);
    }
    for (int i = 0; i < j; ++i) res.q.axpy(y[i], Z[i]);
    r = b - apply(geo, res.q);
    rnorm = std::sqrt(dot(r, r));
  }
  res.iterations = total;
  res.residual = rnorm / scale;
  if (!(res.residual <= p.tol)) {
    std::ostringstream os;
    os << "pressure solve did not converge: residual " << res.residual << " after " << total << " iterations";
    throw NonConvergence(os.str(), res.residual, total);
  }
  return res;
}

}  // namespace fbe
