#include "fracac/measure.hpp"

#include <algorithm>
#include <cmath>

#include "fracac/error.hpp"
#include "fracac/interp.hpp"
#include "fracac/specfun.hpp"

namespace fracac {
namespace {

void refined(const Grid1D& grid, std::span<const double> values, int factor, std::vector<double>& xf,
             std::vector<double>& yf) {
  require(values.size() == grid.size(), ErrorKind::shape, "field does not match grid");
  const auto x = grid.nodes();
  refine(x, values, factor, xf, yf);
}

double lerp_root(double x0, double y0, double x1, double y1, double level) {
  return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
}

}  // namespace

std::vector<double> find_zeros(const Grid1D& grid, std::span<const double> values, int fine_factor) {
  std::vector<double> xf, yf, z;
  refined(grid, values, fine_factor, xf, yf);
  const std::size_t n = yf.size();
  std::size_t i = 0;
  while (i + 1 < n) {
    if (yf[i] == 0.0) {
      // run of exact zeros: a sign change only if the neighbours disagree
      std::size_t j = i;
      while (j < n && yf[j] == 0.0) ++j;
      const bool has_left = i > 0, has_right = j < n;
      if (has_left && has_right && (yf[i - 1] > 0) != (yf[j] > 0)) z.push_back(0.5 * (xf[i] + xf[j - 1]));
      i = j;
      continue;
    }
    if ((yf[i] < 0 && yf[i + 1] > 0) || (yf[i] > 0 && yf[i + 1] < 0))
      z.push_back(lerp_root(xf[i], yf[i], xf[i + 1], yf[i + 1], 0.0));
    ++i;
  }
  std::sort(z.begin(), z.end());
  return z;
}

std::optional<std::vector<double>> interface_widths(const Grid1D& grid, std::span<const double> values,
                                                    double delta, int fine_factor) {
  std::vector<double> xf, yf;
  refined(grid, values, fine_factor, xf, yf);
  if (yf.empty()) return std::nullopt;
  const auto [mn, mx] = std::minmax_element(yf.begin(), yf.end());
  const double lo = *mn + delta, hi = *mx - delta;
  if (!(hi > lo)) return std::nullopt;
  auto inside = [&](double y) { return y > lo && y < hi; };
  // crossing of whichever threshold separates a and b
  auto cross = [&](std::size_t a, std::size_t b) {
    const double level = (yf[a] <= lo || yf[b] <= lo) ? lo : hi;
    return lerp_root(xf[a], yf[a], xf[b], yf[b], level);
  };
  std::vector<double> w;
  const std::size_t n = yf.size();
  std::size_t i = 0;
  while (i < n) {
    if (!inside(yf[i])) {
      // transition steeper than one fine cell: both thresholds crossed inside [i, i+1]
      if (i + 1 < n && !inside(yf[i + 1]) && ((yf[i] <= lo && yf[i + 1] >= hi) || (yf[i] >= hi && yf[i + 1] <= lo))) {
        const double a = lerp_root(xf[i], yf[i], xf[i + 1], yf[i + 1], lo);
        const double b = lerp_root(xf[i], yf[i], xf[i + 1], yf[i + 1], hi);
        w.push_back(std::abs(b - a));
      }
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && inside(yf[j + 1])) ++j;
    const double left = i == 0 ? xf.front() : cross(i - 1, i);
    const double right = j + 1 >= n ? xf.back() : cross(j, j + 1);
    w.push_back(right - left);
    i = j + 1;
  }
  return w;
}

double distance_to_one(const Grid1D& grid, std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += (v - 1.0) * (v - 1.0);
  return std::sqrt(s * grid.spacing());
}

Renormalized renormalize(double speed, double gap, double t_col, double width, double eps, double alpha,
                         double d0) {
  const double c = alpha < 2.0 ? c_alpha(alpha) : MeasurementRecord::nan();
  Renormalized r;
  r.s_hat = c * std::pow(gap, alpha) * speed / std::pow(eps, 1.0 + alpha);
  r.t_hat = std::pow(eps / d0, 1.0 + alpha) * 2.0 * (1.0 + alpha) / c * t_col;
  r.w_hat = width * std::pow(eps, -kWidthKappa1 / alpha - kWidthKappa2);
  return r;
}

WindowSampler::WindowSampler(const Grid1D& grid, double t_lo, double t_hi, const MeasureOptions& opt)
    : grid_(grid), lo_(t_lo), hi_(t_hi), n_(static_cast<std::size_t>(std::max(opt.speed_samples, 2))), opt_(opt) {
  require(t_hi > t_lo && t_lo >= 0.0, ErrorKind::config, "speed window must be a nonempty interval");
}

double WindowSampler::target(std::size_t i) const {
  return lo_ + (hi_ - lo_) * static_cast<double>(i + 1) / static_cast<double>(n_ + 1);
}

bool WindowSampler::due(const Stepper& s) const { return next_ < n_ && s.time() >= target(next_); }

void WindowSampler::observe(const FieldState& st) {
  SpeedSample smp;
  smp.t = st.time;
  smp.zeros = find_zeros(grid_, st.values, opt_.fine_factor);
  if (auto w = interface_widths(grid_, st.values, opt_.delta, opt_.fine_factor)) smp.widths = std::move(*w);
  samples_.push_back(std::move(smp));
  // one sample per step even when several targets fall inside it
  while (next_ < n_ && target(next_) <= st.time) ++next_;
}

SpeedResult measure_speed(const std::vector<SpeedSample>& samples) {
  require(samples.size() >= 2, ErrorKind::window, "speed window holds fewer than 2 samples");
  SpeedResult r;
  r.samples = samples.size();
  require(!samples.front().zeros.empty(), ErrorKind::window,
          "no interface at the start of the speed window; increase the collapse-time estimate");
  double pos = samples.front().zeros.back();
  r.track.push_back(pos);
  r.times.push_back(samples.front().t);
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const auto& prev = samples[k - 1].zeros;
    double radius = 1e300;
    for (std::size_t i = 0; i + 1 < prev.size(); ++i) radius = std::min(radius, 0.5 * (prev[i + 1] - prev[i]));
    const auto& z = samples[k].zeros;
    double best = 0, dist = 1e300;
    for (double c : z)
      if (std::abs(c - pos) < dist) {
        dist = std::abs(c - pos);
        best = c;
      }
    if (z.empty() || dist > radius)
      fail(ErrorKind::window, "tracked interface lost at t=" + std::to_string(samples[k].t) +
                                  "; the collapse happened inside the window, use a larger estimate");
    pos = best;
    r.track.push_back(pos);
    r.times.push_back(samples[k].t);
  }
  double acc = 0.0;
  for (std::size_t k = 1; k < r.track.size(); ++k)
    acc += std::abs((r.track[k] - r.track[k - 1]) / (r.times[k] - r.times[k - 1]));
  r.speed = acc / static_cast<double>(r.track.size() - 1);

  const std::size_t mid = samples.size() / 2;
  const auto& zm = samples[mid].zeros;
  double gap = MeasurementRecord::nan();
  for (double c : zm)
    if (c != r.track[mid] && (std::isnan(gap) || std::abs(c - r.track[mid]) < gap)) gap = std::abs(c - r.track[mid]);
  r.gap = gap;

  double wsum = 0.0;
  std::size_t wn = 0;
  for (const auto& s : samples)
    for (double w : s.widths) {
      wsum += w;
      ++wn;
    }
  r.width_mean = wn ? wsum / static_cast<double>(wn) : MeasurementRecord::nan();
  return r;
}

void MemoryProbe::after_step(const Stepper& s) {
  const double v = s.value_at(x_c_);
  const double t = s.time();
  if (count_++ % chunk_ == 0 || chunks_.empty()) {
    chunks_.push_back({t, t, v});
  } else {
    auto& c = chunks_.back();
    c.t1 = t;
    c.vmin = std::min(c.vmin, v);
  }
}

double MemoryProbe::min_before(double t_end, double fraction) const {
  const double t0 = (1.0 - fraction) * t_end;
  double m = MeasurementRecord::nan();
  for (const auto& c : chunks_)
    if (c.t1 >= t0 && c.t0 <= t_end && (std::isnan(m) || c.vmin < m)) m = c.vmin;
  return m;
}

MeasurementRecord measure_run(Stepper& stepper, const MeasurePlan& plan) {
  MeasurementRecord rec;
  rec.eps = plan.eps;
  rec.alpha = plan.alpha;
  rec.L = stepper.grid().half_length();
  rec.gamma_used = plan.gamma;
  rec.d0 = plan.d0;
  rec.t_col_estimate = plan.t_col_estimate;
  rec.dt = stepper.dt();
  rec.N = stepper.grid().size();
  const MeasureOptions& o = plan.options;

  std::vector<Observer*> obs;
  std::optional<WindowSampler> sampler;
  const bool windowed = plan.t_col_estimate > 0.0 && std::isfinite(plan.t_col_estimate);
  if (windowed) {
    sampler.emplace(stepper.grid(), o.window_lo * plan.t_col_estimate, o.window_hi * plan.t_col_estimate, o);
    obs.push_back(&*sampler);
  }
  MemoryProbe probe(plan.x_c);
  obs.push_back(&probe);
  obs.insert(obs.end(), plan.extra_observers.begin(), plan.extra_observers.end());

  StopRule stop = plan.stop_after_window && windowed
                      ? StopRule::until(o.window_hi * plan.t_col_estimate)
                      : StopRule::collapse(plan.max_time, o.collapse_tol);
  // memory check needs interfaces to begin with
  const auto& v0 = stepper.snapshot().values;
  const bool has_interface = !v0.empty() && *std::min_element(v0.begin(), v0.end()) < 0.0;
  const RunResult res = run(stepper, stop, obs);

  std::vector<std::string> problems;
  if (res.outcome == RunOutcome::collapsed) {
    rec.t_col = res.final_state.time;
    if (has_interface) rec.memory_min = probe.min_before(rec.t_col, o.memory_fraction);
  } else if (res.outcome == RunOutcome::timeout) {
    problems.push_back("no collapse before t=" + std::to_string(plan.max_time));
  }

  if (windowed) {
    const auto& smp = sampler->samples();
    rec.sample_count = smp.size();
    if (!smp.empty()) {
      rec.zeros = smp[smp.size() / 2].zeros;
      rec.widths = smp[smp.size() / 2].widths;
    }
    try {
      if (smp.size() < sampler->planned())
        fail(ErrorKind::window, "run ended before the speed window was complete");
      const SpeedResult sp = measure_speed(smp);
      rec.speed = sp.speed;
      rec.gap = sp.gap;
      rec.width_mean = sp.width_mean;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::window) throw;
      problems.push_back(e.what());
    }
  }
  const Renormalized r = renormalize(rec.speed, rec.gap, rec.t_col, rec.width_mean, plan.eps, plan.alpha, plan.d0);
  rec.s_hat = r.s_hat;
  rec.t_hat = r.t_hat;
  rec.w_hat = r.w_hat;
  for (const auto& p : problems) rec.error += (rec.error.empty() ? "" : "; ") + p;
  return rec;
}

}  // namespace fracac
