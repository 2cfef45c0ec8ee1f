#pragma once
#include <cstddef>
#include <vector>

namespace fracac {

/// Uniform midpoint grid on [-L, L]: x_j = -L + (j + 1/2) h, h = 2L/N.
class Grid1D {
 public:
  Grid1D() = default;
  Grid1D(double half_length, std::size_t n);

  double half_length() const { return L_; }
  std::size_t size() const { return n_; }
  double spacing() const { return h_; }
  double node(std::size_t j) const { return -L_ + (static_cast<double>(j) + 0.5) * h_; }
  std::vector<double> nodes() const;

 private:
  double L_ = 0;
  std::size_t n_ = 0;
  double h_ = 0;
};

Grid1D build_grid(double L, std::size_t N);

/// Smallest power of two N >= 256 with spacing 2L/N <= eps/2.
std::size_t auto_points(double L, double eps);

}  // namespace fracac
