#pragma once
#include <memory>
#include <span>
#include <vector>

namespace fracac {

/// Monotone piecewise-cubic (PCHIP) interpolant held constant outside the data range.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  ~MonotoneCubic();
  MonotoneCubic(MonotoneCubic&&) noexcept;
  MonotoneCubic& operator=(MonotoneCubic&&) noexcept;

  double operator()(double x) const;
  double x_min() const { return lo_; }
  double x_max() const { return hi_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double lo_ = 0, hi_ = 0, y_lo_ = 0, y_hi_ = 0;
};

/// Refines nodal samples by `factor` subdivisions per cell using the monotone
/// cubic interpolant; returns (x, y) on [x.front(), x.back()].
void refine(std::span<const double> x, std::span<const double> y, int factor, std::vector<double>& xf,
            std::vector<double>& yf);

}  // namespace fracac
