#include "fracac/reduced_ode.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "fracac/error.hpp"
#include "fracac/specfun.hpp"

namespace fracac {
namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;

double min_gap(const State& x, int* where = nullptr) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i] - x[i + 1] < g) {
      g = x[i] - x[i + 1];
      if (where) *where = static_cast<int>(i) + 1;
    }
  }
  return g;
}

}  // namespace

CenterSystem make_center_system(std::vector<double> centers, double eps, double alpha, double gamma) {
  CenterSystem s;
  std::sort(centers.begin(), centers.end(), std::greater<>());
  s.centers = std::move(centers);
  s.zeta.resize(s.centers.size());
  for (std::size_t i = 0; i < s.zeta.size(); ++i) s.zeta[i] = (i % 2 == 0) ? 1 : -1;
  s.eps = eps;
  s.alpha = alpha;
  s.gamma = gamma;
  validate(s);
  return s;
}

void validate(const CenterSystem& s) {
  require(!s.centers.empty() && s.centers.size() % 2 == 0, ErrorKind::config,
          "need an even, nonzero number of centers");
  require(s.zeta.size() == s.centers.size(), ErrorKind::shape, "orientation count mismatch");
  for (std::size_t i = 0; i < s.zeta.size(); ++i)
    require(s.zeta[i] == ((i % 2 == 0) ? 1 : -1), ErrorKind::config, "orientations must alternate from +1");
  if (!(s.alpha > 0.0 && s.alpha < 2.0)) fail(ErrorKind::domain, "centers ODE needs alpha in (0, 2)");
  require(s.eps > 0.0 && s.gamma > 0.0, ErrorKind::config, "eps and gamma must be positive");
  for (std::size_t i = 0; i + 1 < s.centers.size(); ++i)
    require(s.centers[i] > s.centers[i + 1], ErrorKind::singular, "centers must be strictly ordered");
}

void center_velocities(const CenterSystem& s, const State& x, State& dxdt) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(x[i] > x[i + 1]))
      fail(ErrorKind::singular, "centers " + std::to_string(i + 1) + " and " + std::to_string(i + 2) +
                                    " coincide or crossed");
  const double pref = std::pow(s.eps, 1.0 + s.alpha) * norm_factor(s.alpha) * s.gamma;
  dxdt.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = x[i] - x[j];
      acc += s.zeta[i] * s.zeta[j] * d / std::pow(std::abs(d), 1.0 + s.alpha);
    }
    dxdt[i] = pref * acc;
  }
}

std::vector<double> center_velocities(const CenterSystem& s) {
  validate(s);
  State v;
  center_velocities(s, s.centers, v);
  return v;
}

namespace {
constexpr double kUnderflowGapRel = 1e-3;
}

CollisionReport integrate_centers(const CenterSystem& sys, double t_max, const OdeOptions& opt) {
  validate(sys);
  require(t_max > 0.0, ErrorKind::config, "t_max must be positive");
  auto rhs = [&sys](const State& x, State& dx, double) { center_velocities(sys, x, dx); };
  using Dopri = odeint::runge_kutta_dopri5<State>;
  auto stepper = odeint::make_controlled<Dopri>(opt.abs_tol, opt.rel_tol);

  const double d0 = min_gap(sys.centers);
  const double gap_tol = opt.gap_rel * d0;
  CollisionReport rep;
  rep.zeta = sys.zeta;
  State x = sys.centers;
  double t = 0.0;
  rep.trajectory.push_back({t, x});

  // a characteristic time: the closed-form collision time of the closest pair
  double dt = std::min(t_max, 1e-3 * closed_form_tc(d0, sys.alpha, sys.gamma, sys.eps, TimeConvention::pde));
  long since_sample = 0;
  int rejects_in_row = 0;
  while (t < t_max) {
    dt = std::min(dt, t_max - t);
    State x_prev = x;
    const double t_prev = t;
    odeint::controlled_step_result r;
    try {
      r = stepper.try_step(rhs, x, t, dt);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::singular) throw;
      // a stage crossed a collision; retry smaller and let the event logic localize it
      x = x_prev;
      t = t_prev;
      dt *= 0.5;
      r = odeint::fail;
    }
    if (r == odeint::fail) {
      if (++rejects_in_row > 200 || dt < 1e-14 * std::max(1.0, t)) {
        // Step-size underflow. For alpha > 1 the gap closes like (T - t)^{1/(1+alpha)},
        // so once the gap is tiny the remaining time is below the resolution of t:
        // that is a collision resolved to machine precision, not a stall.
        int where = -1;
        rep.min_gap = min_gap(x, &where);
        rep.collided = rep.min_gap < kUnderflowGapRel * d0;
        if (rep.collided) rep.colliding_index = where;
        rep.t_collision = t;
        rep.trajectory.push_back({t, x});
        return rep;
      }
      continue;
    }
    rejects_in_row = 0;
    ++rep.accepted_steps;
    int where = -1;
    const double g = min_gap(x, &where);
    if (g < gap_tol) {
      // bisect the step length on the sign of (gap - gap_tol) with a fixed dopri5 step
      Dopri fixed;
      double lo = 0.0, hi = t - t_prev;
      while (hi - lo > opt.bisect_rel * std::max(t_prev + lo, 1e-300)) {
        const double mid = 0.5 * (lo + hi);
        State y = x_prev;
        bool below = true;
        try {
          fixed.do_step(rhs, y, t_prev, mid);
          below = min_gap(y) < gap_tol;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::singular) throw;
        }
        (below ? hi : lo) = mid;
      }
      State y = x_prev;
      try {
        fixed.do_step(rhs, y, t_prev, hi);
      } catch (const Error&) {
        y = x;
      }
      rep.collided = true;
      rep.t_collision = t_prev + hi;
      rep.colliding_index = where;
      rep.min_gap = min_gap(y);
      rep.trajectory.push_back({rep.t_collision, y});
      return rep;
    }
    if (++since_sample >= opt.sample_stride) {
      rep.trajectory.push_back({t, x});
      since_sample = 0;
    }
  }
  rep.collided = false;
  rep.t_collision = t;
  rep.min_gap = min_gap(x);
  if (rep.trajectory.back().t != t) rep.trajectory.push_back({t, x});
  return rep;
}

std::vector<double> flow_centers(const CenterSystem& sys, double t_end, double abs_tol, double rel_tol) {
  validate(sys);
  auto rhs = [&sys](const State& x, State& dx, double) { center_velocities(sys, x, dx); };
  State x = sys.centers;
  if (t_end == 0.0) return x;
  const double d0 = min_gap(x);
  const double dt0 = 1e-4 * closed_form_tc(d0, sys.alpha, sys.gamma, sys.eps, TimeConvention::pde);
  odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(abs_tol, rel_tol),
                             rhs, x, 0.0, t_end, t_end > 0 ? dt0 : -dt0);
  return x;
}

double closed_form_tc(double d0, double alpha, double gamma, double eps, TimeConvention conv) {
  require(d0 > 0.0 && gamma > 0.0 && eps > 0.0, ErrorKind::config, "closed_form_tc: inputs must be positive");
  if (!(alpha > 0.0 && alpha < 2.0)) fail(ErrorKind::domain, "closed_form_tc needs alpha in (0, 2)");
  const double t = c_alpha(alpha) * std::pow(d0, 1.0 + alpha) / (2.0 * (1.0 + alpha) * gamma);
  return conv == TimeConvention::pde ? t * std::pow(eps, -(1.0 + alpha)) : t;
}

double sharp_profile(double t, double x, const CollisionReport& report) {
  const auto& tr = report.trajectory;
  require(!tr.empty(), ErrorKind::config, "empty trajectory");
  std::vector<double> c;
  if (t <= tr.front().t) {
    c = tr.front().x;
  } else if (t >= tr.back().t) {
    c = tr.back().x;
  } else {
    auto it = std::upper_bound(tr.begin(), tr.end(), t, [](double v, const TrajectorySample& s) { return v < s.t; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double w = (t - a.t) / (b.t - a.t);
    c.resize(a.x.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = (1.0 - w) * a.x[i] + w * b.x[i];
  }
  double v = 1.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double arg = report.zeta[i] * (x - c[i]);
    v += (arg > 0.0) - (arg < 0.0);
  }
  return v;
}

}  // namespace fracac
