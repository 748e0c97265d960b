#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fbe/errors.hpp"

namespace fbe {

/// Tensor-product slab T^2 x (-b, 0). Horizontal period 2*pi in both
/// directions; vertical nodes are Chebyshev-Gauss-Lobatto points mapped onto
/// [-b, 0] in increasing order, so z.front() == -b and z.back() == 0.
struct Grid {
  int nx = 0;
  int ny = 0;
  int nz = 0;
  double b = 1.0;
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<double> z;

  std::size_t surface_size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t volume_size() const { return surface_size() * nz; }
  /// Row-major with x1 fastest, then x2, then z.
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * (j + static_cast<std::size_t>(ny) * k);
  }
  std::size_t surface_index(int i, int j) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j; }

  /// Signed wavenumber of the FFT index i along an axis of n points:
  /// {0, 1, ..., n/2-1, -n/2, ..., -1}.
  static int wavenumber(int i, int n) { return i < n / 2 ? i : i - n; }
};

/// Validates and builds a grid. Throws ConfigError on odd or undersized mode
/// counts and on b <= 0.
Grid make_grid(int nx, int ny, int nz, double b);

struct SurfaceTag {};
struct VolumeTag {};

/// Real samples on the surface (nx*ny) or on the volume (nx*ny*nz).
template <class Tag>
class Field {
 public:
  Field() = default;
  explicit Field(std::size_t n, double value = 0.0) : values_(n, value) {}
  explicit Field(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  const std::vector<double>& values() const { return values_; }
  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  Field& operator+=(const Field& o) {
    check(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  Field& operator*=(const Field& o) {
    check(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
    return *this;
  }
  Field& operator*=(double s) {
    for (double& x : values_) x *= s;
    return *this;
  }
  Field& operator+=(double s) {
    for (double& x : values_) x += s;
    return *this;
  }
  /// this += a * x
  void axpy(double a, const Field& x) {
    check(x);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
  }
  void fill(double v) { std::fill(values_.begin(), values_.end(), v); }

  double max_abs() const {
    double m = 0.0;
    for (double x : values_) m = std::max(m, std::abs(x));
    return m;
  }
  double min() const {
    double m = values_.empty() ? 0.0 : values_[0];
    for (double x : values_) m = std::min(m, x);
    return m;
  }
  bool all_finite() const {
    for (double x : values_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, const Field& b) { return a *= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator-(Field a) { return a *= -1.0; }

 private:
  void check(const Field& o) const {
    if (o.values_.size() != values_.size()) throw ShapeMismatch("field size mismatch");
  }
  std::vector<double> values_;
};

using SurfaceField = Field<SurfaceTag>;
using VolumeField = Field<VolumeTag>;
/// Three Cartesian components of a vector field on the volume.
using VectorField = std::array<VolumeField, 3>;
/// Deformation tensor stored by columns: F[j][i] is F_{ij}.
using TensorField = std::array<VectorField, 3>;

/// Full complex horizontal spectrum with the forward transform divided by
/// nx*ny, so that at(0,0) is the horizontal mean.
struct Spectrum {
  int nx = 0;
  int ny = 0;
  std::vector<std::complex<double>> coeffs;  // indexed by FFT index (i1 + nx*i2)

  std::complex<double> at(int k1, int k2) const {
    return coeffs[static_cast<std::size_t>((k1 + nx) % nx) + static_cast<std::size_t>(nx) * ((k2 + ny) % ny)];
  }
  std::complex<double>& at(int k1, int k2) {
    return coeffs[static_cast<std::size_t>((k1 + nx) % nx) + static_cast<std::size_t>(nx) * ((k2 + ny) % ny)];
  }
};

/// Fourier x Chebyshev discretization on a Grid: FFT plans, Chebyshev
/// differentiation matrix, Clenshaw-Curtis weights and the 2/3 dealiasing
/// mask. Immutable after construction; transforms are safe to call
/// concurrently.
class Discretization {
 public:
  explicit Discretization(Grid grid);
  ~Discretization();
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  const Grid& grid() const { return grid_; }
  int nx() const { return grid_.nx; }
  int ny() const { return grid_.ny; }
  int nz() const { return grid_.nz; }
  double depth() const { return grid_.b; }
  /// Number of complex coefficients per horizontal slice in the half spectrum.
  std::size_t half_size() const { return static_cast<std::size_t>(ny_) * nxh_; }
  int nx_half() const { return nxh_; }

  /// d/dz Chebyshev collocation matrix on the z nodes.
  const Eigen::MatrixXd& cheb_d() const { return d3_; }
  /// Clenshaw-Curtis weights for integrals over [-b, 0].
  const std::vector<double>& vertical_weights() const { return weights_; }

  /// Largest |k| along each axis kept by the 2/3 rule.
  int dealias_kmax_x() const { return grid_.nx / 3; }
  int dealias_kmax_y() const { return grid_.ny / 3; }

  // Half-spectrum helpers: index (i1, i2) with i1 in [0, nx/2], i2 in [0, ny).
  int k1(int i1) const { return i1; }
  int k2(int i2) const { return Grid::wavenumber(i2, grid_.ny); }
  /// Wavenumbers used for differentiation: the Nyquist mode is dropped.
  double k1_deriv(int i1) const { return (i1 == grid_.nx / 2) ? 0.0 : static_cast<double>(i1); }
  double k2_deriv(int i2) const { return (i2 == grid_.ny / 2) ? 0.0 : static_cast<double>(k2(i2)); }
  bool kept(int i1, int i2) const {
    return i1 <= dealias_kmax_x() && std::abs(k2(i2)) <= dealias_kmax_y();
  }

  /// Slice-wise real-to-half-complex transform, scaled by 1/(nx*ny).
  /// `in` holds `slices` contiguous nx*ny slices.
  void forward(const double* in, std::complex<double>* out, int slices) const;
  /// Inverse of forward (no extra scaling).
  void inverse(const std::complex<double>* in, double* out, int slices) const;

  std::vector<std::complex<double>> forward(const VolumeField& f) const;
  std::vector<std::complex<double>> forward(const SurfaceField& f) const;
  VolumeField inverse_volume(const std::vector<std::complex<double>>& c) const;
  SurfaceField inverse_surface(const std::vector<std::complex<double>>& c) const;

  VolumeField d1(const VolumeField& f) const;
  VolumeField d2(const VolumeField& f) const;
  VolumeField d3(const VolumeField& f) const;
  SurfaceField d1(const SurfaceField& f) const;
  SurfaceField d2(const SurfaceField& f) const;
  /// Horizontal gradient from a single forward transform.
  std::array<VolumeField, 2> horizontal_gradient(const VolumeField& f) const;
  std::array<SurfaceField, 2> horizontal_gradient(const SurfaceField& f) const;
  /// Flat gradient (d1, d2, d3).
  VectorField gradient(const VolumeField& f) const;

  /// Zero every mode outside the 2/3 band.
  void dealias(VolumeField& f) const;
  void dealias(SurfaceField& f) const;

  /// Trapezoid (horizontal) x Clenshaw-Curtis (vertical) quadrature.
  double integrate(const VolumeField& f) const;
  /// Trapezoid over T^2.
  double integrate(const SurfaceField& f) const;

  VolumeField zeros_volume() const { return VolumeField(grid_.volume_size()); }
  SurfaceField zeros_surface() const { return SurfaceField(grid_.surface_size()); }
  VectorField zeros_vector() const { return {zeros_volume(), zeros_volume(), zeros_volume()}; }
  TensorField zeros_tensor() const { return {zeros_vector(), zeros_vector(), zeros_vector()}; }

  void check(const VolumeField& f) const {
    if (f.size() != grid_.volume_size()) throw ShapeMismatch("volume field does not match grid");
  }
  void check(const SurfaceField& f) const {
    if (f.size() != grid_.surface_size()) throw ShapeMismatch("surface field does not match grid");
  }

 private:
  struct Plans;
  Grid grid_;
  int nxh_;
  int ny_;
  Eigen::MatrixXd d3_;
  std::vector<double> weights_;
  std::unique_ptr<Plans> plans_;
};

/// Full spectrum of a surface field (forward transform divided by nx*ny).
Spectrum horizontal_spectrum(const Discretization& disc, const SurfaceField& f);
/// Inverse of horizontal_spectrum; the imaginary part of the result is dropped.
SurfaceField inverse_spectrum(const Discretization& disc, const Spectrum& s);

// Level-set helpers.
SurfaceField trace_top(const Discretization& disc, const VolumeField& f);
SurfaceField trace_bottom(const Discretization& disc, const VolumeField& f);
SurfaceField level(const Discretization& disc, const VolumeField& f, int k);
void set_level(const Discretization& disc, VolumeField& f, int k, const SurfaceField& s);
/// f(x, z) = s(x) * profile(z)
VolumeField extend(const Discretization& disc, const SurfaceField& s, std::span<const double> profile);

/// Chebyshev-Gauss-Lobatto nodes on [-1, 1] in increasing order.
std::vector<double> cgl_nodes(int n);
/// Differentiation matrix on cgl_nodes(n).
Eigen::MatrixXd cheb_diff_matrix(const std::vector<double>& nodes);
/// Clenshaw-Curtis weights on cgl_nodes(n) (sum to 2).
std::vector<double> clenshaw_curtis_weights(int n);

}  // namespace fbe
