#pragma once
#include <optional>
#include <vector>

#include "fracac/grid.hpp"
#include "fracac/interp.hpp"
#include "fracac/spectral_solver.hpp"

namespace fracac {

struct LayerOptions {
  double dt = 0.05;
  double tol = 1e-10;  // on ||u^{k+1} - u^k||_inf / dt
  double max_time = 1e4;
  Scheme scheme = Scheme::sbdf2;
};

/// Stationary monotone layer v on [-L, L] with v(0) = 0, computed at eps = 1.
struct LayerSolution {
  double alpha = 0;
  double L = 0;
  Grid1D grid;
  std::vector<double> v;
  double interior_seminorm = 0;  // int_{-L}^{L} |v'|^2
  double tail_term = 0;          // closed-form contribution of |x| > L
  double seminorm_sq = 0;        // interior + tail
  double gamma = 0;              // 1 / seminorm_sq
  double tail_p = 0;             // NaN at alpha = 2
  double settle_time = 0;        // time at which stationarity was reached
  long steps = 0;
  double tol = 0;
};

LayerSolution compute_layer(double alpha, double L, std::size_t N, const LayerOptions& opt = {});

/// Recomputes gamma from the stored profile: spectral derivative, midpoint rule,
/// plus the algebraic tail correction (dropped at alpha = 2).
double gamma_constant(const LayerSolution& layer);

/// Tail term 2 p^2 alpha^2 / (2 alpha + 1) L^{-2 alpha - 1}.
double layer_tail_term(double alpha, double L);

/// Relative mismatch between the fitted tail amplitude of 1 - v on (L/2, 0.9 L)
/// and |p|. The fitted shape includes the mirror images created by the Neumann
/// walls. Empty when not applicable (alpha = 2 or tail below noise).
std::optional<double> tail_check(const LayerSolution& layer);

/// Neumann-image tail shape sum_k (-1)^k [(2kL + x)^{-a} + (2(k+1)L - x)^{-a}].
double image_tail_shape(double x, double alpha, double L);

/// || (-Delta)^{alpha/2} v - (v - v^3) ||_inf
double stationarity_residual(const LayerSolution& layer);

/// Layer profile as a function on the real line: monotone cubic inside
/// [-L, L], extended by -1 / +1 outside.
class LayerProfile {
 public:
  explicit LayerProfile(const LayerSolution& layer);
  double operator()(double s) const;

 private:
  double L_;
  MonotoneCubic spline_;
};

}  // namespace fracac
