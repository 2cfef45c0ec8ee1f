#include "fracac/spectral_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fracac/error.hpp"

namespace fracac {
namespace {

std::vector<double> implicit_diag(const CosineBasis& b, const SolverConfig& cfg, double weight) {
  const double z = weight * cfg.dt * std::pow(cfg.eps, cfg.alpha);
  std::vector<double> d(b.size());
  for (std::size_t n = 0; n < d.size(); ++n) d[n] = 1.0 + z * std::pow(b.eigenvalue(n), cfg.alpha / 2.0);
  return d;
}

void check_finite(std::span<const double> u, long step, double t) {
  for (double x : u) {
    if (!std::isfinite(x) || std::abs(x) > kBlowupBound)
      throw BlowupError(step, t, "solution left the admissible range at step " + std::to_string(step) +
                                     " (t=" + std::to_string(t) + ")");
  }
}

std::vector<double> reaction_nodal(std::span<const double> u) {
  std::vector<double> r(u.size());
  std::transform(u.begin(), u.end(), r.begin(), reaction);
  return r;
}

}  // namespace

const char* scheme_name(Scheme s) { return s == Scheme::imex_euler ? "imex_euler" : "sbdf2"; }

Scheme parse_scheme(const std::string& s) {
  if (s == "imex_euler" || s == "imex") return Scheme::imex_euler;
  if (s == "sbdf2") return Scheme::sbdf2;
  fail(ErrorKind::config, "unknown scheme '" + s + "'");
}

void validate(const SolverConfig& cfg) {
  require(cfg.eps > 0.0 && std::isfinite(cfg.eps), ErrorKind::config, "eps must be positive");
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 2.0)) fail(ErrorKind::domain, "alpha must lie in (0, 2]");
  require(cfg.dt > 0.0 && cfg.dt <= kMaxDt, ErrorKind::config,
          "dt must lie in (0, " + std::to_string(kMaxDt) + "], got " + std::to_string(cfg.dt));
  require(cfg.grid.size() >= 2, ErrorKind::config, "solver grid is empty");
}

FieldState step_imex_euler(const CosineBasis& basis, const FieldState& state, const SolverConfig& cfg) {
  validate(cfg);
  require(state.values.size() == basis.size(), ErrorKind::shape, "state does not match grid");
  check_finite(state.values, state.step_index, state.time);
  auto c = basis.forward(state.values);
  const auto nh = basis.forward(reaction_nodal(state.values));
  const auto d = implicit_diag(basis, cfg, 1.0);
  for (std::size_t n = 0; n < c.size(); ++n) c[n] = (c[n] + cfg.dt * nh[n]) / d[n];
  FieldState out{basis.inverse(c), state.time + cfg.dt, state.step_index + 1};
  check_finite(out.values, out.step_index, out.time);
  return out;
}

FieldState step_sbdf2(const CosineBasis& basis, const FieldState& state_k, const FieldState& state_km1,
                      const SolverConfig& cfg) {
  validate(cfg);
  require(state_k.values.size() == basis.size() && state_km1.values.size() == basis.size(),
          ErrorKind::shape, "state does not match grid");
  const double gap = state_k.time - state_km1.time;
  require(std::abs(gap - cfg.dt) <= 1e-9 * std::max(1.0, std::abs(state_k.time)), ErrorKind::config,
          "SBDF2 states must be exactly dt apart");
  check_finite(state_k.values, state_k.step_index, state_k.time);
  const auto ck = basis.forward(state_k.values);
  const auto cm = basis.forward(state_km1.values);
  const auto nk = basis.forward(reaction_nodal(state_k.values));
  const auto nm = basis.forward(reaction_nodal(state_km1.values));
  const auto d = implicit_diag(basis, cfg, 2.0 / 3.0);
  std::vector<double> c(ck.size());
  for (std::size_t n = 0; n < c.size(); ++n)
    c[n] = (4.0 / 3.0 * ck[n] - 1.0 / 3.0 * cm[n] + 2.0 / 3.0 * cfg.dt * (2.0 * nk[n] - nm[n])) / d[n];
  FieldState out{basis.inverse(c), state_k.time + cfg.dt, state_k.step_index + 1};
  check_finite(out.values, out.step_index, out.time);
  return out;
}

SpectralStepper::SpectralStepper(const SolverConfig& cfg, std::vector<double> u0,
                                 std::shared_ptr<const CosineBasis> basis)
    : cfg_(cfg), basis_(std::move(basis)), u_(std::move(u0)), rate_(std::numeric_limits<double>::infinity()) {
  validate(cfg_);
  if (!basis_) basis_ = std::make_shared<const CosineBasis>(cfg_.grid);
  require(basis_->size() == cfg_.grid.size(), ErrorKind::shape, "basis does not match grid");
  require(u_.size() == cfg_.grid.size(), ErrorKind::shape,
          "initial datum has " + std::to_string(u_.size()) + " values, grid has " +
              std::to_string(cfg_.grid.size()));
  check_finite(u_, 0, 0.0);
  const std::size_t n = u_.size();
  c_.resize(n);
  basis_->forward(u_, c_);
  c_prev_.resize(n);
  nhat_.resize(n);
  nhat_prev_.resize(n);
  work_.resize(n);
  u_old_.resize(n);
  // stored as reciprocals
  denom1_ = implicit_diag(*basis_, cfg_, 1.0);
  denom2_ = implicit_diag(*basis_, cfg_, 2.0 / 3.0);
  for (double& d : denom1_) d = 1.0 / d;
  for (double& d : denom2_) d = 1.0 / d;
}

void SpectralStepper::nonlinear_coeffs(std::vector<double>& out) {
  for (std::size_t j = 0; j < u_.size(); ++j) work_[j] = reaction(u_[j]);
  basis_->forward(work_, out);
}

void SpectralStepper::advance() {
  const std::size_t n = u_.size();
  const double dt = cfg_.dt;
  nonlinear_coeffs(nhat_);
  double* c = c_.data();
  double* cp = c_prev_.data();
  const double* nh = nhat_.data();
  const double* nhp = nhat_prev_.data();
  if (cfg_.scheme == Scheme::imex_euler || step_ == 0) {
    // IMEX-Euler, also the SBDF2 startup step
    const double* inv = denom1_.data();
    for (std::size_t m = 0; m < n; ++m) {
      cp[m] = c[m];
      c[m] = (c[m] + dt * nh[m]) * inv[m];
    }
  } else {
    const double* inv = denom2_.data();
    const double a = 4.0 / 3.0, b = 1.0 / 3.0, g = 2.0 / 3.0 * dt;
    for (std::size_t m = 0; m < n; ++m) {
      const double next = (a * c[m] - b * cp[m] + g * (2.0 * nh[m] - nhp[m])) * inv[m];
      cp[m] = c[m];
      c[m] = next;
    }
  }
  std::swap(nhat_, nhat_prev_);
  u_old_.swap(u_);
  basis_->inverse(c_, u_);
  ++step_;
  time_ = static_cast<double>(step_) * dt;
  double r = 0.0, big = 0.0;
  bool finite = true;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = u_[j];
    finite &= std::isfinite(x);
    big = std::max(big, std::abs(x));
    r = std::max(r, std::abs(x - u_old_[j]));
  }
  if (!finite || big > kBlowupBound)
    throw BlowupError(step_, time_, "solution left the admissible range at step " + std::to_string(step_) +
                                        " (t=" + std::to_string(time_) + ")");
  rate_ = r / dt;
}

double SpectralStepper::distance_to_one() const {
  double s = 0.0;
  for (double x : u_) s += (x - 1.0) * (x - 1.0);
  return std::sqrt(s * cfg_.grid.spacing());
}

double SpectralStepper::value_at(double x) const {
  // linear interpolation between nodes, constant beyond the outermost nodes
  const Grid1D& g = cfg_.grid;
  const double s = (x + g.half_length()) / g.spacing() - 0.5;
  if (s <= 0.0) return u_.front();
  const auto last = static_cast<double>(u_.size() - 1);
  if (s >= last) return u_.back();
  const auto j = static_cast<std::size_t>(s);
  const double w = s - static_cast<double>(j);
  return (1.0 - w) * u_[j] + w * u_[j + 1];
}

}  // namespace fracac
