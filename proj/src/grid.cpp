#include "fbe/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <numbers>

namespace fbe {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double neumaier_sum(const double* x, std::size_t n) {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double t = s + x[i];
    if (std::abs(s) >= std::abs(x[i]))
      c += (s - t) + x[i];
    else
      c += (x[i] - t) + s;
    s = t;
  }
  return s + c;
}

}  // namespace

Grid make_grid(int nx, int ny, int nz, double b) {
  if (nx % 2 != 0) throw ConfigError("grid.nx", "nx must be even");
  if (ny % 2 != 0) throw ConfigError("grid.ny", "ny must be even");
  if (nx < 8) throw ConfigError("grid.nx", "nx must be >= 8");
  if (ny < 8) throw ConfigError("grid.ny", "ny must be >= 8");
  if (nz < 9) throw ConfigError("grid.nz", "nz must be >= 9");
  if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("b", "b must be > 0");

  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.b = b;
  const double two_pi = 2.0 * std::numbers::pi;
  g.x1.resize(nx);
  g.x2.resize(ny);
  for (int i = 0; i < nx; ++i) g.x1[i] = two_pi * i / nx;
  for (int j = 0; j < ny; ++j) g.x2[j] = two_pi * j / ny;
  auto xi = cgl_nodes(nz);
  g.z.resize(nz);
  for (int k = 0; k < nz; ++k) g.z[k] = 0.5 * b * (xi[k] - 1.0);
  g.z.front() = -b;
  g.z.back() = 0.0;
  return g;
}

std::vector<double> cgl_nodes(int n) {
  const int N = n - 1;
  std::vector<double> x(n);
  // sin form keeps the nodes exactly antisymmetric about 0
  for (int j = 0; j < n; ++j) x[j] = std::sin(std::numbers::pi * (2.0 * j - N) / (2.0 * N));
  return x;
}

Eigen::MatrixXd cheb_diff_matrix(const std::vector<double>& nodes) {
  const int n = static_cast<int>(nodes.size());
  const int N = n - 1;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  auto c = [N](int i) { return (i == 0 || i == N) ? 2.0 : 1.0; };
  const double pi = std::numbers::pi;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double diff = 2.0 * std::sin(pi * (i + j) / (2.0 * N)) * std::sin(pi * (i - j) / (2.0 * N));
      double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      D(i, j) = c(i) / c(j) * sign / diff;
    }
  }
  for (int i = 0; i < n; ++i) {
    // negative sum trick, smallest terms first
    std::vector<double> row;
    for (int j = 0; j < n; ++j)
      if (j != i) row.push_back(D(i, j));
    std::sort(row.begin(), row.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    D(i, i) = -neumaier_sum(row.data(), row.size());
  }
  return D;
}

std::vector<double> clenshaw_curtis_weights(int n) {
  const int N = n - 1;
  const double pi = std::numbers::pi;
  std::vector<double> w(n, 0.0);
  std::vector<double> v(n, 1.0);
  if (N % 2 == 0) {
    w[0] = w[N] = 1.0 / (N * N - 1.0);
    for (int k = 1; k < N / 2; ++k)
      for (int i = 1; i < N; ++i) v[i] -= 2.0 * std::cos(2.0 * k * pi * i / N) / (4.0 * k * k - 1.0);
    for (int i = 1; i < N; ++i) v[i] -= std::cos(N * pi * i / N) / (N * N - 1.0);
  } else {
    w[0] = w[N] = 1.0 / (static_cast<double>(N) * N);
    for (int k = 1; k <= (N - 1) / 2; ++k)
      for (int i = 1; i < N; ++i) v[i] -= 2.0 * std::cos(2.0 * k * pi * i / N) / (4.0 * k * k - 1.0);
  }
  for (int i = 1; i < N; ++i) w[i] = 2.0 * v[i] / N;
  return w;
}

struct Discretization::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

Discretization::Discretization(Grid grid)
    : grid_(std::move(grid)), nxh_(grid_.nx / 2 + 1), ny_(grid_.ny), plans_(std::make_unique<Plans>()) {
  auto xi = cgl_nodes(grid_.nz);
  d3_ = cheb_diff_matrix(xi) * (2.0 / grid_.b);
  weights_ = clenshaw_curtis_weights(grid_.nz);
  for (double& w : weights_) w *= 0.5 * grid_.b;

  const std::size_t n = grid_.surface_size();
  std::vector<double> rbuf(n);
  std::vector<std::complex<double>> cbuf(half_size());
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->r2c = fftw_plan_dft_r2c_2d(grid_.ny, grid_.nx, rbuf.data(), reinterpret_cast<fftw_complex*>(cbuf.data()),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans_->c2r = fftw_plan_dft_c2r_2d(grid_.ny, grid_.nx, reinterpret_cast<fftw_complex*>(cbuf.data()), rbuf.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Discretization::~Discretization() = default;

void Discretization::forward(const double* in, std::complex<double>* out, int slices) const {
  const std::size_t n = grid_.surface_size();
  const std::size_t h = half_size();
  const double scale = 1.0 / static_cast<double>(n);
  std::vector<double> scratch(n);
  for (int s = 0; s < slices; ++s) {
    std::copy(in + s * n, in + (s + 1) * n, scratch.begin());
    fftw_execute_dft_r2c(plans_->r2c, scratch.data(), reinterpret_cast<fftw_complex*>(out + s * h));
    for (std::size_t i = 0; i < h; ++i) out[s * h + i] *= scale;
  }
}

void Discretization::inverse(const std::complex<double>* in, double* out, int slices) const {
  const std::size_t n = grid_.surface_size();
  const std::size_t h = half_size();
  std::vector<std::complex<double>> scratch(h);
  for (int s = 0; s < slices; ++s) {
    std::copy(in + s * h, in + (s + 1) * h, scratch.begin());
    fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out + s * n);
  }
}

std::vector<std::complex<double>> Discretization::forward(const VolumeField& f) const {
  check(f);
  std::vector<std::complex<double>> c(half_size() * grid_.nz);
  forward(f.data(), c.data(), grid_.nz);
  return c;
}

std::vector<std::complex<double>> Discretization::forward(const SurfaceField& f) const {
  check(f);
  std::vector<std::complex<double>> c(half_size());
  forward(f.data(), c.data(), 1);
  return c;
}

VolumeField Discretization::inverse_volume(const std::vector<std::complex<double>>& c) const {
  if (c.size() != half_size() * grid_.nz) throw ShapeMismatch("volume spectrum does not match grid");
  VolumeField f(grid_.volume_size());
  inverse(c.data(), f.data(), grid_.nz);
  return f;
}

SurfaceField Discretization::inverse_surface(const std::vector<std::complex<double>>& c) const {
  if (c.size() != half_size()) throw ShapeMismatch("surface spectrum does not match grid");
  SurfaceField f(grid_.surface_size());
  inverse(c.data(), f.data(), 1);
  return f;
}

namespace {

void apply_derivative(const Discretization& d, std::vector<std::complex<double>>& c, int slices, int axis) {
  const std::size_t h = d.half_size();
  const std::complex<double> I(0.0, 1.0);
  for (int s = 0; s < slices; ++s)
    for (int i2 = 0; i2 < d.ny(); ++i2)
      for (int i1 = 0; i1 < d.nx_half(); ++i1) {
        double k = axis == 1 ? d.k1_deriv(i1) : d.k2_deriv(i2);
        c[s * h + i1 + static_cast<std::size_t>(d.nx_half()) * i2] *= I * k;
      }
}

}  // namespace

VolumeField Discretization::d1(const VolumeField& f) const { return horizontal_gradient(f)[0]; }
VolumeField Discretization::d2(const VolumeField& f) const { return horizontal_gradient(f)[1]; }
SurfaceField Discretization::d1(const SurfaceField& f) const { return horizontal_gradient(f)[0]; }
SurfaceField Discretization::d2(const SurfaceField& f) const { return horizontal_gradient(f)[1]; }

std::array<VolumeField, 2> Discretization::horizontal_gradient(const VolumeField& f) const {
  auto c = forward(f);
  auto c2 = c;
  apply_derivative(*this, c, grid_.nz, 1);
  apply_derivative(*this, c2, grid_.nz, 2);
  return {inverse_volume(c), inverse_volume(c2)};
}

std::array<SurfaceField, 2> Discretization::horizontal_gradient(const SurfaceField& f) const {
  auto c = forward(f);
  auto c2 = c;
  apply_derivative(*this, c, 1, 1);
  apply_derivative(*this, c2, 1, 2);
  return {inverse_surface(c), inverse_surface(c2)};
}

VolumeField Discretization::d3(const VolumeField& f) const {
  check(f);
  const Eigen::Index S = static_cast<Eigen::Index>(grid_.surface_size());
  VolumeField out(grid_.volume_size());
  Eigen::Map<const Eigen::MatrixXd> in(f.data(), S, grid_.nz);
  Eigen::Map<Eigen::MatrixXd> res(out.data(), S, grid_.nz);
  res.noalias() = in * d3_.transpose();
  return out;
}

VectorField Discretization::gradient(const VolumeField& f) const {
  auto h = horizontal_gradient(f);
  return {std::move(h[0]), std::move(h[1]), d3(f)};
}

void Discretization::dealias(VolumeField& f) const {
  auto c = forward(f);
  const std::size_t h = half_size();
  for (int s = 0; s < grid_.nz; ++s)
    for (int i2 = 0; i2 < ny_; ++i2)
      for (int i1 = 0; i1 < nxh_; ++i1)
        if (!kept(i1, i2)) c[s * h + i1 + static_cast<std::size_t>(nxh_) * i2] = 0.0;
  inverse(c.data(), f.data(), grid_.nz);
}

void Discretization::dealias(SurfaceField& f) const {
  auto c = forward(f);
  for (int i2 = 0; i2 < ny_; ++i2)
    for (int i1 = 0; i1 < nxh_; ++i1)
      if (!kept(i1, i2)) c[i1 + static_cast<std::size_t>(nxh_) * i2] = 0.0;
  inverse(c.data(), f.data(), 1);
}

double Discretization::integrate(const VolumeField& f) const {
  check(f);
  const std::size_t n = grid_.surface_size();
  std::vector<double> levels(grid_.nz);
  for (int k = 0; k < grid_.nz; ++k) levels[k] = weights_[k] * neumaier_sum(f.data() + k * n, n);
  const double cell = 4.0 * std::numbers::pi * std::numbers::pi / static_cast<double>(n);
  return cell * neumaier_sum(levels.data(), levels.size());
}

double Discretization::integrate(const SurfaceField& f) const {
  check(f);
  const std::size_t n = grid_.surface_size();
  const double cell = 4.0 * std::numbers::pi * std::numbers::pi / static_cast<double>(n);
  return cell * neumaier_sum(f.data(), n);
}

Spectrum horizontal_spectrum(const Discretization& disc, const SurfaceField& f) {
  auto half = disc.forward(f);
  const int nx = disc.nx(), ny = disc.ny(), nxh = disc.nx_half();
  Spectrum s{nx, ny, std::vector<std::complex<double>>(static_cast<std::size_t>(nx) * ny)};
  for (int i2 = 0; i2 < ny; ++i2)
    for (int i1 = 0; i1 < nx; ++i1) {
      std::complex<double> v;
      if (i1 < nxh)
        v = half[i1 + static_cast<std::size_t>(nxh) * i2];
      else
        v = std::conj(half[(nx - i1) + static_cast<std::size_t>(nxh) * ((ny - i2) % ny)]);
      s.coeffs[i1 + static_cast<std::size_t>(nx) * i2] = v;
    }
  return s;
}

SurfaceField inverse_spectrum(const Discretization& disc, const Spectrum& s) {
  const int nx = disc.nx(), ny = disc.ny(), nxh = disc.nx_half();
  if (s.nx != nx || s.ny != ny || s.coeffs.size() != static_cast<std::size_t>(nx) * ny)
    throw ShapeMismatch("spectrum does not match grid");
  std::vector<std::complex<double>> half(disc.half_size());
  for (int i2 = 0; i2 < ny; ++i2)
    for (int i1 = 0; i1 < nxh; ++i1) {
      auto a = s.coeffs[(i1 % nx) + static_cast<std::size_t>(nx) * i2];
      auto b = s.coeffs[((nx - i1) % nx) + static_cast<std::size_t>(nx) * ((ny - i2) % ny)];
      half[i1 + static_cast<std::size_t>(nxh) * i2] = 0.5 * (a + std::conj(b));
    }
  return disc.inverse_surface(half);
}

SurfaceField level(const Discretization& disc, const VolumeField& f, int k) {
  disc.check(f);
  const std::size_t n = disc.grid().surface_size();
  SurfaceField s(n);
  std::copy(f.data() + k * n, f.data() + (k + 1) * n, s.data());
  return s;
}

SurfaceField trace_top(const Discretization& disc, const VolumeField& f) { return level(disc, f, disc.nz() - 1); }
SurfaceField trace_bottom(const Discretization& disc, const VolumeField& f) { return level(disc, f, 0); }

void set_level(const Discretization& disc, VolumeField& f, int k, const SurfaceField& s) {
  disc.check(f);
  disc.check(s);
  const std::size_t n = disc.grid().surface_size();
  std::copy(s.data(), s.data() + n, f.data() + k * n);
}

VolumeField extend(const Discretization& disc, const SurfaceField& s, std::span<const double> profile) {
  disc.check(s);
  if (profile.size() != static_cast<std::size_t>(disc.nz())) throw ShapeMismatch("profile length must equal nz");
  const std::size_t n = disc.grid().surface_size();
  VolumeField f(disc.grid().volume_size());
  for (int k = 0; k < disc.nz(); ++k)
    for (std::size_t i = 0; i < n; ++i) f[k * n + i] = s[i] * profile[k];
  return f;
}

}  // namespace fbe
