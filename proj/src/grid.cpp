#include "fracac/grid.hpp"

#include <cmath>
#include <string>

#include "fracac/error.hpp"

namespace fracac {

Grid1D::Grid1D(double half_length, std::size_t n)
    : L_(half_length), n_(n), h_(2.0 * half_length / static_cast<double>(n)) {}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> x(n_);
  for (std::size_t j = 0; j < n_; ++j) x[j] = node(j);
  return x;
}

Grid1D build_grid(double L, std::size_t N) {
  require(std::isfinite(L) && L > 0.0, ErrorKind::config, "grid half-length must be positive");
  // two points is the smallest grid on which the cosine pair is defined
  require(N >= 2, ErrorKind::config, "grid needs at least 2 points, got " + std::to_string(N));
  return Grid1D(L, N);
}

std::size_t auto_points(double L, double eps) {
  require(L > 0.0 && eps > 0.0, ErrorKind::config, "auto_points: L and eps must be positive");
  std::size_t n = 256;
  while (2.0 * L / static_cast<double>(n) > eps / 2.0) n *= 2;
  return n;
}

}  // namespace fracac
