#include "fracac/plot.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fracac/fit.hpp"
#include "fracac/io.hpp"

namespace fracac {
namespace {

constexpr double kW = 640, kH = 440, kLeft = 70, kRight = 170, kTop = 40, kBottom = 55;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Axis {
  double lo, hi;
  bool log;
  double map(double v, double a, double b) const {
    const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return a + t * (b - a);
  }
  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      for (double e = std::floor(lo); e <= std::ceil(hi) + 1e-12; e += 1.0) {
        const double v = std::pow(10.0, e);
        for (double m : {1.0, 2.0, 5.0})
          if (std::log10(m * v) >= lo - 1e-12 && std::log10(m * v) <= hi + 1e-12) t.push_back(m * v);
      }
      return t;
    }
    const double span = hi - lo, raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return t;
  }
};

Axis make_axis(const std::vector<double>& vals, bool log) {
  double lo = INFINITY, hi = -INFINITY;
  for (double v : vals) {
    if (!std::isfinite(v) || (log && v <= 0)) continue;
    const double w = log ? std::log10(v) : v;
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad, log};
}

}  // namespace

std::string render_svg(const PlotSpec& spec, const std::string& hash) {
  std::vector<double> xs, ys;
  for (const auto& s : spec.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const Axis ax = make_axis(xs, spec.log_x), ay = make_axis(ys, spec.log_y);
  const double x0 = kLeft, x1 = kW - kRight, y0 = kH - kBottom, y1 = kTop;
  std::string o;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kW) + "\" height=\"" + fmt(kH) +
       "\" data-x-scale=\"" + (spec.log_x ? "log" : "linear") + "\" data-y-scale=\"" +
       (spec.log_y ? "log" : "linear") + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  if (!hash.empty()) o += "<!-- config_hash=" + esc(hash) + " -->\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + fmt((x0 + x1) / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + esc(spec.title) +
       "</text>\n";
  o += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y1) + "\" width=\"" + fmt(x1 - x0) + "\" height=\"" + fmt(y0 - y1) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.ticks()) {
    const double px = ax.map(t, x0, x1);
    o += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(px) + "\" y2=\"" + fmt(y0 + 5) +
         "\" stroke=\"black\"/><text x=\"" + fmt(px) + "\" y=\"" + fmt(y0 + 18) + "\" text-anchor=\"middle\">" +
         tick_label(t) + "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double py = ay.map(t, y0, y1);
    o += "<line x1=\"" + fmt(x0 - 5) + "\" y1=\"" + fmt(py) + "\" x2=\"" + fmt(x0) + "\" y2=\"" + fmt(py) +
         "\" stroke=\"black\"/><text x=\"" + fmt(x0 - 8) + "\" y=\"" + fmt(py + 4) + "\" text-anchor=\"end\">" +
         tick_label(t) + "</text>\n";
  }
  o += "<text x=\"" + fmt((x0 + x1) / 2) + "\" y=\"" + fmt(kH - 12) + "\" text-anchor=\"middle\">" +
       esc(spec.x_label) + "</text>\n";
  o += "<text transform=\"translate(18," + fmt((y0 + y1) / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       esc(spec.y_label) + "</text>\n";
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const char* col = kColors[k % std::size(kColors)];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if ((spec.log_x && s.x[i] <= 0) || (spec.log_y && s.y[i] <= 0)) continue;
      const double px = ax.map(s.x[i], x0, x1), py = ay.map(s.y[i], y0, y1);
      pts += fmt(px) + "," + fmt(py) + " ";
      if (s.markers)
        o += "<circle cx=\"" + fmt(px) + "\" cy=\"" + fmt(py) + "\" r=\"3.5\" fill=\"" + col + "\"/>\n";
    }
    if (!pts.empty())
      o += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + col + "\" stroke-width=\"1.5\"" +
           (s.markers ? " stroke-dasharray=\"4,3\"" : "") + "/>\n";
    const double ly = y1 + 14 + 18.0 * k;
    o += "<line x1=\"" + fmt(x1 + 12) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" + fmt(x1 + 32) + "\" y2=\"" +
         fmt(ly - 4) + "\" stroke=\"" + col + "\" stroke-width=\"2\"/><text x=\"" + fmt(x1 + 38) + "\" y=\"" +
         fmt(ly) + "\">" + esc(s.label) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

std::vector<std::string> emit_plots(const std::vector<MeasurementRecord>& rows, const std::string& dir,
                                    const std::string& hash, std::vector<std::string>* notes) {
  ensure_directory(dir);
  std::vector<std::string> written;
  auto note = [&](const std::string& s) {
    if (notes) notes->push_back(s);
  };
  auto emit = [&](const std::string& name, PlotSpec spec) {
    std::vector<Series> kept;
    for (auto& s : spec.series) {
      bool any = false;
      for (std::size_t i = 0; i < s.y.size(); ++i)
        any = any || (std::isfinite(s.y[i]) && (!spec.log_y || s.y[i] > 0));
      if (any)
        kept.push_back(std::move(s));
      else
        note(name + ": series '" + s.label + "' has no finite data, skipped");
    }
    if (kept.empty()) {
      note(name + ": no finite data, skipped");
      return;
    }
    spec.series = std::move(kept);
    atomic_write(join_path(dir, name), render_svg(spec, hash));
    written.push_back(name);
  };

  std::map<double, std::vector<const MeasurementRecord*>> by_eps, by_alpha;
  for (const auto& r : rows) {
    by_eps[r.eps].push_back(&r);
    by_alpha[r.alpha].push_back(&r);
  }
  // gamma per alpha, as used by the runs
  Series gam{"gamma", {}, {}, false}, inv_gam{"1/gamma", {}, {}, false};
  for (const auto& [a, rs] : by_alpha)
    for (const auto* r : rs)
      if (std::isfinite(r->gamma_used)) {
        gam.x.push_back(a);
        gam.y.push_back(r->gamma_used);
        inv_gam.x.push_back(a);
        inv_gam.y.push_back(1.0 / r->gamma_used);
        break;
      }

  PlotSpec speed{"renormalized speed", "alpha", "s_hat", false, false, {}};
  PlotSpec collapse{"renormalized collapse time", "alpha", "t_hat", false, false, {}};
  for (const auto& [e, rs] : by_eps) {
    Series s{"eps=" + format_number(e), {}, {}, true}, t = s;
    for (const auto* r : rs) {
      s.x.push_back(r->alpha);
      s.y.push_back(r->s_hat);
      t.x.push_back(r->alpha);
      t.y.push_back(r->t_hat);
    }
    speed.series.push_back(s);
    collapse.series.push_back(t);
  }
  speed.series.push_back(gam);
  collapse.series.push_back(inv_gam);
  emit("speed.svg", speed);
  emit("collapse_time.svg", collapse);

  PlotSpec width{"interface width", "eps", "width", true, true, {}};
  for (const auto& [a, rs] : by_alpha) {
    Series s{"alpha=" + format_number(a), {}, {}, true};
    std::vector<std::pair<double, double>> pts;
    for (const auto* r : rs) {
      s.x.push_back(r->eps);
      s.y.push_back(r->width_mean);
      if (std::isfinite(r->width_mean) && r->width_mean > 0) pts.emplace_back(r->eps, r->width_mean);
    }
    width.series.push_back(s);
    try {
      const PowerLawFit f = fit_power_law(pts);
      Series line{"fit a=" + tick_label(f.a), {}, {}, false};
      double lo = INFINITY, hi = 0;
      for (const auto& p : pts) lo = std::min(lo, p.first), hi = std::max(hi, p.first);
      for (double x : {lo, hi}) {
        line.x.push_back(x);
        line.y.push_back(f.b * std::pow(x, f.a));
      }
      width.series.push_back(line);
    } catch (const std::exception& ex) {
      note("width fit alpha=" + format_number(a) + ": " + ex.what());
    }
  }
  emit("width.svg", width);
  return written;
}

}  // namespace fracac
