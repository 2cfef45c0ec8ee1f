#pragma once

namespace fracac {

/// Euler Gamma for real x; throws ErrorKind::domain on poles.
double gamma_fn(double x);

/// Closed-form constants attached to a fractional order alpha in (0, 2].
/// At alpha = 2 the fractional constants degenerate (Gamma(-1) pole) and are NaN
/// with `fractional_available == false`; d_alpha is +inf there.
struct AlphaConstants {
  double alpha = 0;
  double norm_factor = 0;  // prefactor of the centers ODE
  double c_alpha = 0;      // Gamma(1-alpha) cos(alpha pi / 2) / 2
  double d_alpha = 0;      // extension normalization 2^{1-alpha} Gamma(1-alpha/2) / Gamma(alpha/2)
  double tail_p = 0;       // layer tail coefficient, v(x) ~ 1 + p x^{-alpha}
  bool fractional_available = true;
};

AlphaConstants alpha_constants(double alpha);

double c_alpha(double alpha);
double norm_factor(double alpha);
double d_alpha(double alpha);
double tail_p(double alpha);

inline constexpr double kC1GuardBand = 1e-8;

}  // namespace fracac
