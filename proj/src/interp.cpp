#include "fracac/interp.hpp"

#include <cmath>
// Boost 1.74 pchip.hpp calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "fracac/error.hpp"

namespace fracac {

struct MonotoneCubic::Impl {
  boost::math::interpolators::pchip<std::vector<double>> f;
};

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y) {
  require(x.size() == y.size(), ErrorKind::shape, "interpolation data length mismatch");
  require(x.size() >= 4, ErrorKind::shape, "monotone cubic needs at least 4 points");
  lo_ = x.front();
  hi_ = x.back();
  y_lo_ = y.front();
  y_hi_ = y.back();
  impl_ = std::make_unique<Impl>(Impl{{std::move(x), std::move(y)}});
}

MonotoneCubic::~MonotoneCubic() = default;
MonotoneCubic::MonotoneCubic(MonotoneCubic&&) noexcept = default;
MonotoneCubic& MonotoneCubic::operator=(MonotoneCubic&&) noexcept = default;

double MonotoneCubic::operator()(double x) const {
  if (x <= lo_) return y_lo_;
  if (x >= hi_) return y_hi_;
  return impl_->f(x);
}

void refine(std::span<const double> x, std::span<const double> y, int factor, std::vector<double>& xf,
            std::vector<double>& yf) {
  require(x.size() == y.size(), ErrorKind::shape, "refine: length mismatch");
  require(factor >= 1, ErrorKind::config, "refine: factor must be >= 1");
  const std::size_t n = x.size();
  xf.clear();
  yf.clear();
  if (n == 0) return;
  if (factor == 1 || n < 4) {
    xf.assign(x.begin(), x.end());
    yf.assign(y.begin(), y.end());
    return;
  }
  MonotoneCubic f({x.begin(), x.end()}, {y.begin(), y.end()});
  xf.reserve((n - 1) * factor + 1);
  yf.reserve((n - 1) * factor + 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    xf.push_back(x[j]);
    yf.push_back(y[j]);
    for (int k = 1; k < factor; ++k) {
      const double t = x[j] + (x[j + 1] - x[j]) * k / factor;
      xf.push_back(t);
      yf.push_back(f(t));
    }
  }
  xf.push_back(x[n - 1]);
  yf.push_back(y[n - 1]);
}

}  // namespace fracac
