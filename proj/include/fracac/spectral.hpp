#pragma once
#include <memory>
#include <span>
#include <vector>

#include "fracac/grid.hpp"

namespace fracac {

/// Neumann cosine eigenbasis of -d^2/dx^2 on [-L, L] matched to the midpoint grid.
///
/// Coefficients are L2-orthonormal: c_n = (u, phi_n) with phi_0 = 1/sqrt(2L),
/// phi_n = cos(n pi (x+L)/(2L)) / sqrt(L), so sum c_n^2 = h sum u_j^2 exactly.
/// The object is immutable after construction; all transforms write into
/// caller-owned buffers, so one instance may be shared by many threads.
class CosineBasis {
 public:
  explicit CosineBasis(const Grid1D& grid);
  ~CosineBasis();
  CosineBasis(const CosineBasis&) = delete;
  CosineBasis& operator=(const CosineBasis&) = delete;

  const Grid1D& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }

  /// lambda_n = (n pi / (2L))^2
  double eigenvalue(std::size_t n) const;
  /// lambda_n^{alpha/2} for every n
  std::vector<double> symbol(double alpha) const;

  void forward(std::span<const double> values, std::span<double> coeffs) const;
  void inverse(std::span<const double> coeffs, std::span<double> values) const;
  /// Nodal values of the x-derivative of the cosine series.
  void derivative(std::span<const double> coeffs, std::span<double> values) const;

  std::vector<double> forward(std::span<const double> values) const;
  std::vector<double> inverse(std::span<const double> coeffs) const;

 private:
  struct Plans;
  void dct2_raw(const double* x, double* y) const;
  void dct3_raw(const double* x, double* y) const;

  Grid1D grid_;
  std::unique_ptr<Plans> plans_;
};

struct SpectralField {
  Grid1D grid;
  std::vector<double> coeffs;
};

SpectralField forward(const CosineBasis& basis, std::span<const double> values);
std::vector<double> inverse(const CosineBasis& basis, const SpectralField& field);

/// eps^alpha (-Delta)^{alpha/2} u for the spectral Neumann operator.
std::vector<double> apply_frac_laplacian(const CosineBasis& basis, std::span<const double> values,
                                         double alpha, double eps);

}  // namespace fracac
