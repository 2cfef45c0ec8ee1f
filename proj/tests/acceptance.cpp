// Acceptance run: one PASS/FAIL line per criterion.
//
//   fracac_acceptance [--out DIR] [--only 1,4,9] [--workers W]
//
// Sweep tables are kept in DIR keyed by config hash; a rerun with an unchanged
// configuration reuses them (runs are deterministic, so the numbers are identical).
#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "fracac/error.hpp"
#include "fracac/harness.hpp"
#include "fracac/io.hpp"
#include "fracac/layer.hpp"
#include "fracac/reduced_ode.hpp"
#include "fracac/specfun.hpp"
#include "gen.hpp"
#include "property_checks.hpp"

using namespace fracac;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v, int prec = 6) {
  char b[64];
  std::snprintf(b, sizeof b, "%.*g", prec, v);
  return b;
}

ProgressFn log_to(const std::string& path) {
  auto mu = std::make_shared<std::mutex>();
  return [path, mu](const std::string& msg) {
    std::lock_guard lock(*mu);
    if (FILE* f = std::fopen(path.c_str(), "a")) {
      std::fprintf(f, "%s\n", msg.c_str());
      std::fclose(f);
    }
  };
}

/// Records of a sweep, from DIR/name/records.csv when the stored hash matches.
std::vector<MeasurementRecord> cached_sweep(const ExperimentConfig& cfg, const std::string& root,
                                            const std::string& name, LayerCache& cache, bool& reused) {
  const std::string dir = join_path(root, name), path = join_path(dir, "records.csv");
  const std::string hash = config_hash(cfg);
  reused = false;
  if (fs::exists(path)) {
    const std::string text = read_file(path);
    if (text.rfind("# config_hash=" + hash + "\n", 0) == 0) {
      reused = true;
      return parse_records_csv(text);
    }
  }
  ensure_directory(dir);
  std::vector<MeasurementRecord> rows;
  const ProgressFn progress = log_to(join_path(dir, "progress.log"));
  if (cfg.method == Method::both) {
    for (const auto& row : compare_methods(cfg, cache, progress)) {
      rows.push_back(row.spectral);
      rows.push_back(row.extension);
    }
  } else {
    rows = run_sweep(cfg, cache, progress);
  }
  atomic_write(path, records_csv(rows, hash));
  return rows;
}

Outcome constants_identity() {
  const auto t0 = Clock::now();
  testing::Gen g(1);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    double a = g.uniform(0.05, 1.95);
    if (a == 1.0) a = 1.0 + 1e-3;
    worst = std::max(worst, std::abs(c_alpha(a) * norm_factor(a) - 1));
  }
  const double at1 = std::abs(c_alpha(1.0) - M_PI / 4);
  const double dt = seconds_since(t0);
  return {worst < 1e-10 && at1 < 1e-8 && dt < 1,
          "max |C*norm-1| = " + num(worst, 3) + ", |C(1)-pi/4| = " + num(at1, 3) + ", " + num(dt, 3) + " s"};
}

Outcome layer_constant() {
  const LayerSolution l09 = compute_layer(0.9, 10, 8192);
  const LayerSolution l2 = compute_layer(2.0, 10, 8192);
  const double r09 = std::abs(l09.gamma - 1.28550) / 1.28550;
  const double g2 = 3 / (2 * std::sqrt(2.0)), r2 = std::abs(l2.gamma - g2) / g2;
  return {r09 < 0.01 && r2 < 0.01, "gamma(0.9) = " + num(l09.gamma, 7) + " (rel " + num(r09, 3) + " vs 1.28550), gamma(2) = " +
                                       num(l2.gamma, 7) + " (rel " + num(r2, 3) + ")"};
}

Outcome ode_closed_form() {
  const auto t0 = Clock::now();
  testing::Gen g(3);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const double d0 = g.uniform(0.5, 4), alpha = g.uniform(0.1, 1.9), gamma = g.uniform(0.5, 2), eps = g.uniform(0.002, 0.1);
    const double tc = closed_form_tc(d0, alpha, gamma, eps, TimeConvention::pde);
    const CollisionReport r = integrate_centers(make_center_system({d0 / 2, -d0 / 2}, eps, alpha, gamma), 10 * tc);
    worst = std::max(worst, r.collided ? std::abs(r.t_collision - tc) / tc : INFINITY);
  }
  const CollisionReport p = integrate_centers(make_center_system({1.0, -1.0}, 0.01, 0.9, 1.28550), 1e5);
  const double rp = std::abs(p.t_collision - 3587.10) / 3587.10;
  const double dt = seconds_since(t0);
  return {worst < 1e-3 && p.collided && rp < 5e-3 && dt < 10,
          "max rel diff " + num(worst, 3) + " over 20 tuples, preset t = " + num(p.t_collision, 8) + ", " + num(dt, 3) + " s"};
}

Outcome collapse_reproduction(const std::string& out, LayerCache& cache) {
  bool reused = false;
  const auto rows = cached_sweep(preset_config("fig-metastability"), out, "fig-metastability", cache, reused);
  const MeasurementRecord& r = rows.at(0);
  const bool ok = r.t_col >= 3580 && r.t_col <= 3810;
  return {ok, "t_col = " + num(r.t_col, 8) + " (window [3580, 3810])" + (reused ? ", cached" : "") +
                  (r.error.empty() ? "" : ", error: " + r.error)};
}

struct SpeedSweep {
  std::vector<MeasurementRecord> rows;
  bool reused = false;
};

Outcome renormalized_speed(const SpeedSweep& s) {
  bool ok = !s.rows.empty();
  double worst = 0, spread = 0;
  std::map<double, std::vector<double>> by_alpha;
  std::string bad;
  for (const auto& r : s.rows) {
    const double rel = std::abs(r.s_hat - r.gamma_used) / r.gamma_used;
    if (!(rel <= 0.25)) {
      ok = false;
      bad += " (eps " + num(r.eps) + ", alpha " + num(r.alpha) + ": s_hat " + num(r.s_hat, 4) + ")";
    }
    worst = std::max(worst, std::isfinite(rel) ? rel : INFINITY);
    by_alpha[r.alpha].push_back(r.s_hat);
  }
  for (const auto& [a, v] : by_alpha) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double sp = *hi / *lo - 1;
    spread = std::max(spread, std::isfinite(sp) ? sp : INFINITY);
  }
  ok = ok && spread < 0.15;
  return {ok, "max |s_hat/gamma - 1| = " + num(worst, 3) + ", max eps spread = " + num(spread, 3) +
                  (s.reused ? ", cached" : "") + bad};
}

Outcome renormalized_time(const SpeedSweep& s) {
  bool ok = !s.rows.empty();
  double lo = INFINITY, hi = 0;
  std::string bad;
  for (const auto& r : s.rows) {
    const double q = r.t_hat * r.gamma_used;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
    if (!(q >= 0.98 && q <= 3)) {
      ok = false;
      bad += " (eps " + num(r.eps) + ", alpha " + num(r.alpha) + ": t_hat*gamma " + num(q, 4) + ")";
    }
  }
  return {ok, "t_hat*gamma in [" + num(lo, 4) + ", " + num(hi, 4) + "]" + (s.reused ? ", cached" : "") + bad};
}

Outcome width_law(const std::string& out, LayerCache& cache) {
  bool reused = false;
  const auto rows = cached_sweep(preset_config("fig-width"), out, "fig-width", cache, reused);
  const WidthLawFit f = fit_width_law(rows);
  double worst = 0;
  std::string per;
  for (const auto& p : f.per_alpha) {
    worst = std::max(worst, p.residual);
    per += " a(" + num(p.alpha, 3) + ")=" + num(p.a, 4);
  }
  const bool ok = f.per_alpha.size() == 5 && worst < 0.05 && f.kappa1 > -0.23 && f.kappa1 < -0.11 && f.kappa2 > 1.05 &&
                  f.kappa2 < 1.18;
  return {ok, "kappa1 = " + num(f.kappa1, 6) + ", kappa2 = " + num(f.kappa2, 6) + ", max rms = " + num(worst, 3) + ";" +
                  per + (reused ? ", cached" : "")};
}

Outcome method_cross_validation(const std::string& out, LayerCache& cache) {
  bool reused = false;
  const auto rows = cached_sweep(preset_config("fig-compare"), out, "fig-compare", cache, reused);
  std::map<std::pair<double, double>, std::pair<const MeasurementRecord*, const MeasurementRecord*>> cells;
  for (const auto& r : rows) (r.method == "spectral" ? cells[{r.eps, r.alpha}].first : cells[{r.eps, r.alpha}].second) = &r;
  bool ok = cells.size() == 6;
  double worst = 0;
  std::string detail;
  for (const auto& [k, pr] : cells) {
    if (!pr.first || !pr.second) {
      ok = false;
      continue;
    }
    const ComparisonRow c = compare_records(*pr.first, *pr.second);
    const double m = std::max({c.d_speed, c.d_t_col, c.d_width});
    const bool cell_ok = c.comparable && m < 0.05;
    ok = ok && cell_ok;
    worst = std::max(worst, std::isfinite(m) ? m : INFINITY);
    detail += " (" + num(k.first) + "," + num(k.second) + "): " + num(c.d_speed, 2) + "/" + num(c.d_t_col, 2) + "/" +
              num(c.d_width, 2);
  }
  return {ok, "max rel diff " + num(worst, 3) + "; speed/t_col/width per cell" + detail + (reused ? ", cached" : "")};
}

Outcome property_suites() {
  const auto t0 = Clock::now();
  const auto results = testing::run_all_properties();
  const double dt = seconds_since(t0);
  bool ok = dt < 60;
  std::string failed;
  for (const auto& r : results)
    if (!r.pass) {
      ok = false;
      failed += " [" + r.name + ": " + r.detail + "]";
    }
  return {ok, std::to_string(results.size()) + " suites in " + num(dt, 3) + " s" + failed};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string out = "acceptance_out";
  std::string only;
  int workers = 0;
  app.add_option("--out", out, "directory for sweep tables and logs");
  app.add_option("--only", only, "comma separated criterion numbers");
  app.add_option("--workers", workers, "worker threads for the sweeps");
  CLI11_PARSE(app, argc, argv);
  if (workers > 0) setenv("FRACAC_WORKERS", std::to_string(workers).c_str(), 1);

  std::set<int> pick;
  std::stringstream ss(only);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) pick.insert(std::stoi(tok));
  auto wanted = [&](int k) { return pick.empty() || pick.count(k); };

  ensure_directory(out);
  LayerCache cache(join_path(out, "layer_cache.json"));
  int failures = 0;
  auto report = [&](int k, const char* name, const std::function<Outcome()>& f) {
    if (!wanted(k)) return;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %d %-28s %s  %s [%.1f s]\n", k, name, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  };

  report(1, "constants identity", constants_identity);
  report(2, "layer constant", layer_constant);
  report(3, "ODE closed form", ode_closed_form);
  report(4, "PDE collapse time", [&] { return collapse_reproduction(out, cache); });
  SpeedSweep speed;
  if (wanted(5) || wanted(6)) {
    try {
      speed.rows = cached_sweep(preset_config("fig-speed"), out, "fig-speed", cache, speed.reused);
    } catch (const std::exception& e) {
      std::printf("fig-speed sweep failed: %s\n", e.what());
    }
  }
  report(5, "renormalized speed", [&] { return renormalized_speed(speed); });
  report(6, "renormalized collapse time", [&] { return renormalized_time(speed); });
  report(7, "width law", [&] { return width_law(out, cache); });
  report(8, "method cross-validation", [&] { return method_cross_validation(out, cache); });
  report(9, "property suites", property_suites);
  cache.save();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
