#include "fracac/layer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracac/error.hpp"
#include "fracac/specfun.hpp"
#include "fracac/spectral.hpp"

namespace fracac {

double layer_tail_term(double alpha, double L) {
  if (alpha == 2.0) return 0.0;  // exponential decay, no algebraic tail
  const double p = tail_p(alpha);
  return 2.0 * p * p * alpha * alpha / (2.0 * alpha + 1.0) * std::pow(L, -2.0 * alpha - 1.0);
}

LayerSolution compute_layer(double alpha, double L, std::size_t N, const LayerOptions& opt) {
  if (!(alpha > 0.0 && alpha <= 2.0)) fail(ErrorKind::domain, "alpha must lie in (0, 2]");
  require(L >= 5.0, ErrorKind::config, "layer domain needs L >= 5");
  SolverConfig cfg{1.0, alpha, opt.dt, opt.scheme, build_grid(L, N)};
  auto u0 = cfg.grid.nodes();
  for (double& x : u0) x /= L;
  SpectralStepper st(cfg, std::move(u0));
  const auto res = run(st, StopRule::stationary(opt.max_time, opt.tol));

  LayerSolution out;
  out.alpha = alpha;
  out.L = L;
  out.grid = cfg.grid;
  out.v = res.final_state.values;
  out.settle_time = res.final_state.time;
  out.steps = res.final_state.step_index;
  out.tol = opt.tol;
  out.tail_p = alpha == 2.0 ? std::numeric_limits<double>::quiet_NaN() : tail_p(alpha);
  const CosineBasis& b = st.basis();
  std::vector<double> dv(N);
  b.derivative(st.coeffs(), dv);
  double s = 0.0;
  for (double d : dv) s += d * d;
  out.interior_seminorm = s * cfg.grid.spacing();
  out.tail_term = layer_tail_term(alpha, L);
  out.seminorm_sq = out.interior_seminorm + out.tail_term;
  out.gamma = 1.0 / out.seminorm_sq;
  return out;
}

double gamma_constant(const LayerSolution& layer) {
  const CosineBasis b(layer.grid);
  const auto c = b.forward(layer.v);
  std::vector<double> dv(c.size());
  b.derivative(c, dv);
  double s = 0.0;
  for (double d : dv) s += d * d;
  const double total = s * layer.grid.spacing() + layer_tail_term(layer.alpha, layer.L);
  require(total > 0.0, ErrorKind::internal, "layer seminorm is not positive");
  return 1.0 / total;
}

double image_tail_shape(double x, double alpha, double L) {
  // Alternating series with slowly decaying terms: take partial sums near K and
  // smooth them by repeated neighbour averaging (Euler's transform on the tail).
  constexpr int K = 2000;
  constexpr int M = 12;
  double sum = 0.0;
  std::vector<double> partial;
  partial.reserve(M + 1);
  for (int k = 0; k <= K + M; ++k) {
    const double term = std::pow(2.0 * k * L + x, -alpha) + std::pow(2.0 * (k + 1) * L - x, -alpha);
    sum += (k % 2 == 0 ? term : -term);
    if (k >= K) partial.push_back(sum);
  }
  for (int r = 0; r < M; ++r)
    for (std::size_t i = 0; i + 1 < partial.size() - r; ++i) partial[i] = 0.5 * (partial[i] + partial[i + 1]);
  return partial[0];
}

std::optional<double> tail_check(const LayerSolution& layer) {
  if (layer.alpha >= 2.0) return std::nullopt;
  const double L = layer.L;
  double sgy = 0.0, sgg = 0.0, peak = 0.0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < layer.v.size(); ++j) {
    const double x = layer.grid.node(j);
    if (x <= L / 2 || x >= 0.9 * L) continue;
    const double y = 1.0 - layer.v[j];
    const double g = image_tail_shape(x, layer.alpha, L);
    sgy += g * y;
    sgg += g * g;
    peak = std::max(peak, std::abs(y));
    ++n;
  }
  if (n < 2 || peak < 1e-12 || sgg <= 0.0) return std::nullopt;
  const double c = sgy / sgg;
  const double p = std::abs(layer.tail_p);
  return std::abs(c - p) / p;
}

double stationarity_residual(const LayerSolution& layer) {
  const CosineBasis b(layer.grid);
  const auto lap = apply_frac_laplacian(b, layer.v, layer.alpha, 1.0);
  double r = 0.0;
  for (std::size_t j = 0; j < lap.size(); ++j) r = std::max(r, std::abs(lap[j] - reaction(layer.v[j])));
  return r;
}

LayerProfile::LayerProfile(const LayerSolution& layer)
    : L_(layer.L), spline_(layer.grid.nodes(), layer.v) {}

double LayerProfile::operator()(double s) const {
  // the layer is extended by its limits outside the computational interval
  if (s <= -L_) return -1.0;
  if (s >= L_) return 1.0;
  return spline_(s);
}

}  // namespace fracac
