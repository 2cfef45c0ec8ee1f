#pragma once
#include <span>
#include <utility>
#include <vector>

namespace fracac {

/// w ~ b eps^a fitted in log space.
struct PowerLawFit {
  double a = 0;
  double b = 0;
  double residual = 0;  // RMS in log space
  int n_points = 0;
};

/// a(alpha) ~ kappa1 / alpha + kappa2
struct ExponentModelFit {
  double kappa1 = 0;
  double kappa2 = 0;
  double residual = 0;  // RMS
  int n_points = 0;
};

/// Ordinary (optionally weighted) least squares on (log eps, log w).
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points,
                          std::span<const double> weights = {});

ExponentModelFit fit_exponent_model(std::span<const std::pair<double, double>> points,
                                    std::span<const double> weights = {});

struct LineFit {
  double slope = 0, intercept = 0, rms = 0;
};

/// Weighted straight-line least squares; needs >= 3 points with >= 2 distinct abscissae.
LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w = {});

}  // namespace fracac
