#include "fracac/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fracac/error.hpp"

namespace fracac {
namespace {

constexpr double kPi = std::numbers::pi;

bool is_pole(double x) { return x <= 0.0 && x == std::floor(x); }

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    fail(ErrorKind::domain, "alpha must lie in (0, 2], got " + std::to_string(alpha));
}

// cos(alpha pi/2) written as sin((1-alpha) pi/2) keeps relative accuracy near alpha = 1.
double cos_half_pi(double alpha) { return std::sin((1.0 - alpha) * kPi / 2.0); }

}  // namespace

double gamma_fn(double x) {
  if (!std::isfinite(x) || is_pole(x))
    fail(ErrorKind::domain, "gamma_fn: pole or non-finite argument " + std::to_string(x));
  if (x < 0.5) {
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    const double s = std::sin(kPi * x);
    return kPi / (s * std::tgamma(1.0 - x));
  }
  return std::tgamma(x);
}

double c_alpha(double alpha) {
  check_alpha(alpha);
  if (alpha == 2.0) return std::numeric_limits<double>::quiet_NaN();
  if (std::abs(alpha - 1.0) < kC1GuardBand) return kPi / 4.0;
  return gamma_fn(1.0 - alpha) * cos_half_pi(alpha) / 2.0;
}

double norm_factor(double alpha) {
  check_alpha(alpha);
  if (alpha == 2.0) return std::numeric_limits<double>::quiet_NaN();
  return (4.0 / alpha) * std::pow(2.0, alpha) * gamma_fn((1.0 + alpha) / 2.0) /
         (std::sqrt(kPi) * std::abs(gamma_fn(-alpha / 2.0)));
}

double d_alpha(double alpha) {
  check_alpha(alpha);
  // Gamma(1 - alpha/2) has a pole at alpha = 2, so the constant diverges there.
  if (alpha == 2.0) return std::numeric_limits<double>::infinity();
  return std::pow(2.0, 1.0 - alpha) * gamma_fn(1.0 - alpha / 2.0) / gamma_fn(alpha / 2.0);
}

double tail_p(double alpha) {
  const double c = c_alpha(alpha);
  return -1.0 / (4.0 * c);
}

AlphaConstants alpha_constants(double alpha) {
  check_alpha(alpha);
  AlphaConstants k;
  k.alpha = alpha;
  k.d_alpha = d_alpha(alpha);
  if (alpha == 2.0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    k.norm_factor = k.c_alpha = k.tail_p = nan;
    k.fractional_available = false;
    return k;
  }
  k.c_alpha = c_alpha(alpha);
  k.norm_factor = norm_factor(alpha);
  k.tail_p = -1.0 / (4.0 * k.c_alpha);
  return k;
}

}  // namespace fracac
