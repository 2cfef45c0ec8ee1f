#include "fracac/fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracac/error.hpp"

namespace fracac {
namespace {

void check_distinct(std::span<const double> x, const char* what) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    fail(ErrorKind::config, std::string(what) + ": abscissae must be distinct");
}

}  // namespace

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  require(x.size() == y.size(), ErrorKind::shape, "fit: x and y lengths differ");
  require(w.empty() || w.size() == x.size(), ErrorKind::shape, "fit: weight length mismatch");
  if (x.size() < 3) fail(ErrorKind::config, "fit: insufficient data (need at least 3 points)");
  // centred normal equations: well conditioned for log-spaced data
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    require(wi > 0.0, ErrorKind::domain, "fit: weights must be positive");
    sw += wi;
    sx += wi * x[i];
    sy += wi * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sxx += wi * (x[i] - mx) * (x[i] - mx);
    sxy += wi * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorKind::config, "fit: insufficient data (abscissae do not vary)");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / static_cast<double>(x.size()));
  return f;
}

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points, std::span<const double> weights) {
  if (points.size() < 3) fail(ErrorKind::config, "power-law fit: insufficient data (need at least 3 points)");
  std::vector<double> x, y;
  for (const auto& [e, w] : points) {
    if (!(e > 0.0 && w > 0.0) || !std::isfinite(e) || !std::isfinite(w))
      fail(ErrorKind::domain, "power-law fit needs positive finite data");
    x.push_back(std::log(e));
    y.push_back(std::log(w));
  }
  check_distinct(x, "power-law fit");
  const LineFit f = fit_line(x, y, weights);
  return {f.slope, std::exp(f.intercept), f.rms, static_cast<int>(points.size())};
}

ExponentModelFit fit_exponent_model(std::span<const std::pair<double, double>> points,
                                    std::span<const double> weights) {
  if (points.size() < 3) fail(ErrorKind::config, "exponent-model fit: insufficient data (need at least 3 points)");
  std::vector<double> x, y;
  for (const auto& [alpha, a] : points) {
    if (!(alpha > 0.0) || !std::isfinite(a)) fail(ErrorKind::domain, "exponent-model fit needs alpha > 0");
    x.push_back(1.0 / alpha);
    y.push_back(a);
  }
  check_distinct(x, "exponent-model fit");
  const LineFit f = fit_line(x, y, weights);
  return {f.slope, f.intercept, f.rms, static_cast<int>(points.size())};
}

}  // namespace fracac
