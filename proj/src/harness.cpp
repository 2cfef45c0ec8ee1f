#include "fracac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <random>
#include <sstream>
#include <thread>

#include "fracac/error.hpp"
#include "fracac/extension.hpp"
#include "fracac/fit.hpp"
#include "fracac/io.hpp"
#include "fracac/reduced_ode.hpp"
#include "fracac/specfun.hpp"

namespace fracac {
using ojson = nlohmann::ordered_json;

const char* method_name(Method m) {
  switch (m) {
    case Method::spectral: return "spectral";
    case Method::extension: return "extension";
    case Method::both: return "both";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "spectral") return Method::spectral;
  if (s == "extension" || s == "hp") return Method::extension;
  if (s == "both") return Method::both;
  fail(ErrorKind::config, "unknown method '" + s + "' (spectral, extension, both)");
}

std::vector<std::string> preset_names() {
  return {"fig-metastability", "fig-speed", "fig-width", "fig-compare", "fig-alpha2"};
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "custom" || name.empty()) {
    c.preset = "custom";
    return c;
  }
  // the two-interface runs of the results section use centers +-1 (d0 = 2)
  if (name == "fig-metastability") {
    c.eps_list = {0.01};
    c.alpha_list = {0.9};
    c.centers = {1.0, -1.0};
    c.N = 8192;
    c.dt_cap = 0.05;
  } else if (name == "fig-speed") {
    c.eps_list = {0.005, 0.01, 0.02};
    c.alpha_list = {0.6, 0.9, 1.2, 1.5, 1.8};
    c.centers = {1.0, -1.0};
    c.dt_cap = 0.4;
  } else if (name == "fig-width") {
    c.eps_list = {0.005, 0.01, 0.02, 0.04};
    c.alpha_list = {0.8, 1.1, 1.4, 1.7, 1.9};
    c.centers = {1.0, -1.0};
    c.dt_cap = 0.4;
    c.window_only = true;
  } else if (name == "fig-compare") {
    c.method = Method::both;
    c.eps_list = {0.01, 0.02};
    c.alpha_list = {0.6, 1.0, 1.5};
    c.centers = {1.0, -1.0};
    c.dt_cap = 0.4;
    c.p_x = 5;  // cubics at h = eps leave a 5% speed gap at alpha 1.5
  } else if (name == "fig-alpha2") {
    c.L = 5.0;
    c.eps_list = {0.3};
    c.alpha_list = {2.0};
    c.x0 = 1.25;  // L / 4
    c.N = 512;
    c.dt_cap = 0.05;
    c.max_time = 1e6;
  } else {
    fail(ErrorKind::config, "unknown preset '" + name + "'");
  }
  return c;
}

std::pair<double, double> config_centers(const ExperimentConfig& cfg) {
  if (!cfg.centers.empty()) {
    require(cfg.centers.size() == 2, ErrorKind::config, "exactly two centers are supported");
    return {std::max(cfg.centers[0], cfg.centers[1]), std::min(cfg.centers[0], cfg.centers[1])};
  }
  return {cfg.x0, -cfg.x0};
}

void validate(const ExperimentConfig& c) {
  require(!c.eps_list.empty(), ErrorKind::config, "eps list is empty");
  require(!c.alpha_list.empty(), ErrorKind::config, "alpha list is empty");
  require(c.L > 0.0, ErrorKind::config, "L must be positive");
  for (double e : c.eps_list) require(e > 0.0 && std::isfinite(e), ErrorKind::config, "eps values must be positive");
  for (double a : c.alpha_list)
    if (!(a > 0.0 && a <= 2.0)) fail(ErrorKind::domain, "alpha values must lie in (0, 2]");
  if (c.method != Method::spectral)
    for (double a : c.alpha_list)
      require(a < 2.0, ErrorKind::config, "the extension method needs alpha < 2");
  const auto [x1, x2] = config_centers(c);
  require(x1 > x2, ErrorKind::config, "centers must be distinct");
  require(c.dt_rule == "scaled" || c.dt_rule == "fixed", ErrorKind::config, "dt_rule must be 'scaled' or 'fixed'");
  require(c.dt_cap > 0.0 && c.dt_cap <= kMaxDt, ErrorKind::config, "dt_cap out of range");
  require(c.dt_fixed > 0.0 && c.dt_fixed <= kMaxDt, ErrorKind::config, "dt_fixed out of range");
  require(c.delta > 0.0 && c.delta < 0.5, ErrorKind::config, "delta must lie in (0, 0.5)");
  require(c.fine_factor >= 1, ErrorKind::config, "fine_factor must be >= 1");
  require(c.layer_N >= 64, ErrorKind::config, "layer_N too small");
  require(c.layer_L >= 5.0, ErrorKind::config, "layer_L must be >= 5");
  require(c.workers >= 1, ErrorKind::config, "workers must be >= 1");
  require(c.noise >= 0.0, ErrorKind::config, "noise must be nonnegative");
  require(c.p_x >= 1 && c.p_y >= 1 && c.n_layers >= 1 && c.Y > 0 && c.sigma > 0 && c.sigma < 1, ErrorKind::config,
          "invalid extension mesh parameters");
}

namespace {

std::vector<double> parse_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_number(item));
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  fail(ErrorKind::config, "not a boolean: '" + v + "'");
}

std::size_t parse_size(const std::string& v) {
  const double d = parse_number(v);
  require(d >= 0.0 && d == std::floor(d), ErrorKind::config, "not a nonnegative integer: '" + v + "'");
  return static_cast<std::size_t>(d);
}

ojson to_ojson(const ExperimentConfig& c, bool for_hash) {
  ojson j;
  j["preset"] = c.preset;
  j["method"] = method_name(c.method);
  j["L"] = c.L;
  j["eps_list"] = c.eps_list;
  j["alpha_list"] = c.alpha_list;
  j["x0"] = c.x0;
  j["centers"] = c.centers;
  j["N"] = c.N;
  j["layer_N"] = c.layer_N;
  j["layer_L"] = c.layer_L;
  j["dt_rule"] = c.dt_rule;
  j["dt_cap"] = c.dt_cap;
  j["dt_fixed"] = c.dt_fixed;
  j["scheme"] = scheme_name(c.scheme);
  j["delta"] = c.delta;
  j["fine_factor"] = c.fine_factor;
  j["seed"] = c.seed;
  j["noise"] = c.noise;
  if (!for_hash) {
    j["output_dir"] = c.output_dir;
    j["workers"] = c.workers;
  }
  j["window_only"] = c.window_only;
  j["max_time"] = c.max_time;
  j["t_col_estimate"] = c.t_col_estimate;
  j["gamma_override"] = c.gamma_override;
  j["ext_elements"] = c.ext_elements;
  j["p_x"] = c.p_x;
  j["p_y"] = c.p_y;
  j["n_layers"] = c.n_layers;
  j["Y"] = c.Y;
  j["sigma"] = c.sigma;
  return j;
}

std::string json_value_to_option(const ojson& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + format_number(x.get<double>());
    return s;
  }
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  return format_number(v.get<double>());
}

}  // namespace

void set_option(ExperimentConfig& c, const std::string& key, const std::string& v) {
  if (key == "preset") c.preset = v;
  else if (key == "method") c.method = parse_method(v);
  else if (key == "L") c.L = parse_number(v);
  else if (key == "eps_list" || key == "eps") c.eps_list = parse_list(v);
  else if (key == "alpha_list" || key == "alpha") c.alpha_list = parse_list(v);
  else if (key == "x0") { c.x0 = parse_number(v); c.centers.clear(); }
  else if (key == "centers") c.centers = parse_list(v);
  else if (key == "N") c.N = parse_size(v);
  else if (key == "layer_N") c.layer_N = parse_size(v);
  else if (key == "layer_L") c.layer_L = parse_number(v);
  else if (key == "dt_rule") c.dt_rule = v;
  else if (key == "dt_cap") c.dt_cap = parse_number(v);
  else if (key == "dt_fixed" || key == "dt") { c.dt_fixed = parse_number(v); if (key == "dt") c.dt_rule = "fixed"; }
  else if (key == "scheme") c.scheme = parse_scheme(v);
  else if (key == "delta") c.delta = parse_number(v);
  else if (key == "fine_factor") c.fine_factor = static_cast<int>(parse_size(v));
  else if (key == "seed") c.seed = parse_size(v);
  else if (key == "noise") c.noise = parse_number(v);
  else if (key == "output_dir" || key == "out") c.output_dir = v;
  else if (key == "workers") c.workers = static_cast<int>(parse_size(v));
  else if (key == "window_only") c.window_only = parse_bool(v);
  else if (key == "max_time") c.max_time = parse_number(v);
  else if (key == "t_col_estimate") c.t_col_estimate = parse_number(v);
  else if (key == "gamma_override") c.gamma_override = parse_number(v);
  else if (key == "ext_elements") c.ext_elements = parse_size(v);
  else if (key == "p_x") c.p_x = static_cast<int>(parse_size(v));
  else if (key == "p_y") c.p_y = static_cast<int>(parse_size(v));
  else if (key == "n_layers") c.n_layers = static_cast<int>(parse_size(v));
  else if (key == "Y") c.Y = parse_number(v);
  else if (key == "sigma") c.sigma = parse_number(v);
  else fail(ErrorKind::config, "unknown option '" + key + "'");
}

std::string config_json(const ExperimentConfig& c) { return to_ojson(c, false).dump(2); }

ExperimentConfig config_from_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::config, std::string("config JSON: ") + e.what());
  }
  ExperimentConfig c = preset_config(j.value("preset", std::string("custom")));
  for (const auto& [k, v] : j.items()) set_option(c, k, json_value_to_option(v));
  return c;
}

std::string config_hash(const ExperimentConfig& c) { return hex64(fnv1a64(to_ojson(c, true).dump())); }

int effective_workers(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("FRACAC_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return cfg.workers;
}

std::function<double(double)> initial_datum(const ExperimentConfig& cfg, const LayerSolution& layer, double eps) {
  const auto [x1, x2] = config_centers(cfg);
  const double L = cfg.L, clear = 5.0 * eps;
  require(x1 <= L - clear && x2 >= -L + clear, ErrorKind::config,
          "centers need a clearance of 5 eps from the boundary");
  require(x1 - x2 >= clear, ErrorKind::config, "centers need a separation of at least 5 eps");
  auto v = std::make_shared<LayerProfile>(layer);
  std::vector<double> modes;
  if (cfg.noise > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int m = 0; m < 8; ++m) modes.push_back(cfg.noise * U(rng));
  }
  return [v, x1, x2, eps, L, modes](double x) {
    double u = (*v)((x - x1) / eps) + (*v)(-(x - x2) / eps) + 1.0;
    for (std::size_t m = 0; m < modes.size(); ++m)
      u += modes[m] * std::cos(static_cast<double>(m + 1) * M_PI * (x + L) / (2.0 * L));
    return u;
  };
}

// ---------------------------------------------------------------- layer cache

namespace {

std::string layer_key(double alpha, double L, std::size_t N, const LayerOptions& o) {
  return "alpha=" + format_number(alpha) + "|L=" + format_number(L) + "|N=" + std::to_string(N) +
         "|tol=" + format_number(o.tol) + "|dt=" + format_number(o.dt) + "|scheme=" + scheme_name(o.scheme);
}

}  // namespace

LayerCache::LayerCache(std::string path) : path_(std::move(path)) {
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  ojson j;
  try {
    j = ojson::parse(read_file(path_));
  } catch (const std::exception&) {
    return;  // unreadable cache: recompute
  }
  for (const auto& e : j.value("entries", ojson::array())) {
    auto s = std::make_shared<LayerSolution>();
    s->alpha = e.at("alpha").get<double>();
    s->L = e.at("L").get<double>();
    s->v = e.at("v").get<std::vector<double>>();
    s->grid = build_grid(s->L, s->v.size());
    s->interior_seminorm = e.at("interior_seminorm").get<double>();
    s->tail_term = e.at("tail_term").get<double>();
    s->seminorm_sq = e.at("seminorm_sq").get<double>();
    s->gamma = e.at("gamma").get<double>();
    s->tail_p = s->alpha < 2.0 ? tail_p(s->alpha) : std::nan("");
    s->settle_time = e.at("settle_time").get<double>();
    s->steps = e.at("steps").get<long>();
    s->tol = e.at("tol").get<double>();
    entries_[e.at("key").get<std::string>()] = s;
  }
}

std::shared_ptr<const LayerSolution> LayerCache::get(double alpha, double L, std::size_t N, const LayerOptions& opt) {
  const std::string key = layer_key(alpha, L, N, opt);
  std::shared_ptr<std::once_flag> flag;
  {
    std::lock_guard lock(mu_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    auto& f = pending_[key];
    if (!f) f = std::make_shared<std::once_flag>();
    flag = f;
  }
  std::call_once(*flag, [&] {
    auto s = std::make_shared<const LayerSolution>(compute_layer(alpha, L, N, opt));
    std::lock_guard lock(mu_);
    entries_[key] = s;
  });
  std::lock_guard lock(mu_);
  return entries_.at(key);
}

void LayerCache::save() const {
  if (path_.empty()) return;
  ojson j;
  j["entries"] = ojson::array();
  std::lock_guard lock(mu_);
  for (const auto& [key, s] : entries_) {
    ojson e;
    e["key"] = key;
    e["alpha"] = s->alpha;
    e["L"] = s->L;
    e["N"] = s->v.size();
    e["tol"] = s->tol;
    e["gamma"] = s->gamma;
    e["seminorm_sq"] = s->seminorm_sq;
    e["interior_seminorm"] = s->interior_seminorm;
    e["tail_term"] = s->tail_term;
    e["settle_time"] = s->settle_time;
    e["steps"] = s->steps;
    e["v"] = s->v;
    j["entries"].push_back(e);
  }
  atomic_write(path_, j.dump());
}

std::size_t LayerCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

// ---------------------------------------------------------------- runs

double choose_dt(const ExperimentConfig& cfg, double t_estimate) {
  if (cfg.dt_rule == "fixed") return cfg.dt_fixed;
  if (t_estimate > 0.0 && std::isfinite(t_estimate)) return std::min(cfg.dt_cap, 1e-4 * t_estimate);
  return cfg.dt_cap;
}

std::size_t grid_points(const ExperimentConfig& cfg, double eps) {
  return cfg.N ? cfg.N : auto_points(cfg.L, eps);
}

std::size_t extension_elements(const ExperimentConfig& cfg, double eps) {
  if (cfg.ext_elements) return cfg.ext_elements;
  return static_cast<std::size_t>(std::min(std::ceil(2.0 * cfg.L / eps), 8012.0));
}

MeasurementRecord run_cell(const ExperimentConfig& cfg, double eps, double alpha, Method method, LayerCache& cache,
                           const ProgressFn& progress, std::vector<Observer*> extra) {
  MeasurementRecord rec;
  rec.eps = eps;
  rec.alpha = alpha;
  rec.L = cfg.L;
  rec.method = method_name(method);
  try {
    validate(cfg);
    const auto layer = cache.get(alpha, cfg.layer_L, cfg.layer_N);
    const double gamma = cfg.gamma_override > 0.0 ? cfg.gamma_override : layer->gamma;
    const auto [x1, x2] = config_centers(cfg);
    const double d0 = x1 - x2;
    double t_est = cfg.t_col_estimate;
    if (!(t_est > 0.0) && alpha < 2.0) t_est = closed_form_tc(d0, alpha, gamma, eps, TimeConvention::pde);
    const double dt = choose_dt(cfg, t_est);
    const Grid1D grid = build_grid(cfg.L, grid_points(cfg, eps));
    const auto u0 = initial_datum(cfg, *layer, eps);

    MeasurePlan plan;
    plan.eps = eps;
    plan.alpha = alpha;
    plan.gamma = gamma;
    plan.d0 = d0;
    plan.t_col_estimate = t_est > 0.0 ? t_est : 0.0;
    plan.stop_after_window = cfg.window_only;
    plan.max_time = cfg.max_time > 0.0 ? cfg.max_time : 3.0 * t_est + 100.0;
    require(plan.max_time > 0.0 && std::isfinite(plan.max_time), ErrorKind::config,
            "no collapse-time estimate: set max_time");
    plan.x_c = 0.5 * (x1 + x2);
    plan.options.delta = cfg.delta;
    plan.options.fine_factor = cfg.fine_factor;
    plan.extra_observers = std::move(extra);

    if (progress)
      progress(std::string(method_name(method)) + " eps=" + format_number(eps) + " alpha=" + format_number(alpha) +
               " N=" + std::to_string(grid.size()) + " dt=" + format_number(dt) + " t_est=" + format_number(t_est));
    std::unique_ptr<Stepper> st;
    if (method == Method::spectral) {
      std::vector<double> v(grid.size());
      for (std::size_t j = 0; j < v.size(); ++j) v[j] = u0(grid.node(j));
      st = std::make_unique<SpectralStepper>(SolverConfig{eps, alpha, dt, cfg.scheme, grid}, std::move(v));
    } else if (method == Method::extension) {
      ExtensionConfig ec;
      ec.eps = eps;
      ec.alpha = alpha;
      ec.dt = dt;
      ec.mesh = build_mesh_elements(cfg.L, extension_elements(cfg, eps), cfg.Y, cfg.sigma, cfg.n_layers, cfg.p_x,
                                    cfg.p_y);
      ec.grid = grid;
      auto ext = std::make_unique<ExtensionStepper>(ec, u0);
      for (const auto& w : ext->factors().warnings)
        if (progress) progress("warning: " + w);
      st = std::move(ext);
    } else {
      fail(ErrorKind::config, "run_cell needs a single method");
    }
    MeasurementRecord m = measure_run(*st, plan);
    m.method = rec.method;
    m.L = cfg.L;
    rec = std::move(m);
  } catch (const Error& e) {
    rec.error = std::string(kind_name(e.kind())) + ": " + e.what();
  } catch (const std::exception& e) {
    rec.error = std::string("internal: ") + e.what();
  }
  if (progress)
    progress(std::string("done ") + rec.method + " eps=" + format_number(eps) + " alpha=" + format_number(alpha) +
             " t_col=" + format_number(rec.t_col) + " s_hat=" + format_number(rec.s_hat) +
             (rec.error.empty() ? "" : " error=" + rec.error));
  return rec;
}

namespace {

template <class Task>
void parallel_for(std::size_t n, int workers, Task task) {
  const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(workers), n));
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i; (i = next++) < n;) task(i);
  };
  if (w == 1) {
    body();
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < w; ++k) pool.emplace_back(body);
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<MeasurementRecord> run_sweep(const ExperimentConfig& cfg, LayerCache& cache, const ProgressFn& progress) {
  validate(cfg);
  std::vector<std::pair<double, double>> cells;
  for (double e : cfg.eps_list)
    for (double a : cfg.alpha_list) cells.emplace_back(e, a);
  const Method m = cfg.method == Method::both ? Method::spectral : cfg.method;
  std::vector<MeasurementRecord> out(cells.size());
  std::mutex progress_mu;
  ProgressFn safe;
  if (progress)
    safe = [&](const std::string& s) {
      std::lock_guard lock(progress_mu);
      progress(s);
    };
  parallel_for(cells.size(), effective_workers(cfg),
               [&](std::size_t i) { out[i] = run_cell(cfg, cells[i].first, cells[i].second, m, cache, safe); });
  cache.save();
  return out;
}

ComparisonRow compare_records(const MeasurementRecord& s, const MeasurementRecord& e) {
  ComparisonRow r;
  r.eps = s.eps;
  r.alpha = s.alpha;
  r.spectral = s;
  r.extension = e;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(a); };
  r.d_speed = rel(s.speed, e.speed);
  r.d_s_hat = rel(s.s_hat, e.s_hat);
  r.d_t_col = rel(s.t_col, e.t_col);
  r.d_width = rel(s.width_mean, e.width_mean);
  r.comparable = s.error.empty() && e.error.empty() && std::isfinite(r.d_speed) && std::isfinite(r.d_t_col) &&
                 std::isfinite(r.d_width);
  r.flagged = s.alpha < 0.5;
  return r;
}

std::vector<ComparisonRow> compare_methods(const ExperimentConfig& cfg, LayerCache& cache, const ProgressFn& progress) {
  validate(cfg);
  require(cfg.method == Method::both, ErrorKind::config, "compare needs method=both");
  struct Job {
    double eps, alpha;
    Method m;
  };
  std::vector<Job> jobs;
  for (double e : cfg.eps_list)
    for (double a : cfg.alpha_list) {
      jobs.push_back({e, a, Method::spectral});
      jobs.push_back({e, a, Method::extension});
    }
  std::vector<MeasurementRecord> recs(jobs.size());
  std::mutex progress_mu;
  ProgressFn safe;
  if (progress)
    safe = [&](const std::string& s) {
      std::lock_guard lock(progress_mu);
      progress(s);
    };
  parallel_for(jobs.size(), effective_workers(cfg),
               [&](std::size_t i) { recs[i] = run_cell(cfg, jobs[i].eps, jobs[i].alpha, jobs[i].m, cache, safe); });
  cache.save();
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < recs.size(); i += 2) rows.push_back(compare_records(recs[i], recs[i + 1]));
  return rows;
}

// ---------------------------------------------------------------- tables

namespace {

const std::vector<std::string> kRecordColumns = {
    "eps", "alpha", "L", "method", "speed", "s_hat", "t_col", "t_hat", "width_mean", "w_hat", "gamma_used",
    "samples", "error", "N", "dt", "d0", "gap", "t_col_estimate", "memory_min"};

}  // namespace

std::string records_csv(const std::vector<MeasurementRecord>& rows, const std::string& hash) {
  std::string s = "# config_hash=" + hash + "\n";
  for (std::size_t i = 0; i < kRecordColumns.size(); ++i) s += (i ? "," : "") + kRecordColumns[i];
  s += "\n";
  const auto f = format_number;
  for (const auto& r : rows) {
    const std::vector<std::string> cells = {
        f(r.eps),   f(r.alpha),      f(r.L),      csv_escape(r.method), f(r.speed), f(r.s_hat),
        f(r.t_col), f(r.t_hat),      f(r.width_mean), f(r.w_hat),     f(r.gamma_used),
        std::to_string(r.sample_count), csv_escape(r.error), std::to_string(r.N), f(r.dt), f(r.d0), f(r.gap),
        f(r.t_col_estimate), f(r.memory_min)};
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
    s += "\n";
  }
  return s;
}

std::vector<MeasurementRecord> parse_records_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  for (const char* need : {"eps", "alpha", "width_mean"})
    require(t.column(need) >= 0, ErrorKind::config, std::string("measurement CSV lacks column '") + need + "'");
  auto get = [&](const std::vector<std::string>& row, const char* name) -> std::string {
    const int c = t.column(name);
    return c >= 0 ? row[c] : std::string();
  };
  std::vector<MeasurementRecord> out;
  for (const auto& row : t.rows) {
    MeasurementRecord r;
    r.eps = parse_number(get(row, "eps"));
    r.alpha = parse_number(get(row, "alpha"));
    r.L = parse_number(get(row, "L"));
    r.method = get(row, "method");
    r.speed = parse_number(get(row, "speed"));
    r.s_hat = parse_number(get(row, "s_hat"));
    r.t_col = parse_number(get(row, "t_col"));
    r.t_hat = parse_number(get(row, "t_hat"));
    r.width_mean = parse_number(get(row, "width_mean"));
    r.w_hat = parse_number(get(row, "w_hat"));
    r.gamma_used = parse_number(get(row, "gamma_used"));
    const std::string smp = get(row, "samples");
    r.sample_count = smp.empty() ? 0 : static_cast<std::size_t>(parse_number(smp));
    r.error = get(row, "error");
    r.d0 = parse_number(get(row, "d0"));
    r.gap = parse_number(get(row, "gap"));
    r.t_col_estimate = parse_number(get(row, "t_col_estimate"));
    r.memory_min = parse_number(get(row, "memory_min"));
    r.dt = parse_number(get(row, "dt"));
    const std::string n = get(row, "N");
    r.N = n.empty() ? 0 : static_cast<std::size_t>(parse_number(n));
    out.push_back(std::move(r));
  }
  return out;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& hash) {
  std::string s = "# config_hash=" + hash + "\n";
  s += "eps,alpha,speed_spectral,speed_extension,d_speed,s_hat_spectral,s_hat_extension,d_s_hat,"
       "t_col_spectral,t_col_extension,d_t_col,width_spectral,width_extension,d_width,comparable,flagged,error\n";
  const auto f = format_number;
  for (const auto& r : rows) {
    std::string err = r.spectral.error;
    if (!r.extension.error.empty()) err += (err.empty() ? "" : " | ") + std::string("extension: ") + r.extension.error;
    s += f(r.eps) + "," + f(r.alpha) + "," + f(r.spectral.speed) + "," + f(r.extension.speed) + "," + f(r.d_speed) +
         "," + f(r.spectral.s_hat) + "," + f(r.extension.s_hat) + "," + f(r.d_s_hat) + "," + f(r.spectral.t_col) +
         "," + f(r.extension.t_col) + "," + f(r.d_t_col) + "," + f(r.spectral.width_mean) + "," +
         f(r.extension.width_mean) + "," + f(r.d_width) + "," + (r.comparable ? "1" : "0") + "," +
         (r.flagged ? "1" : "0") + "," + csv_escape(err) + "\n";
  }
  return s;
}

WidthLawFit fit_width_law(const std::vector<MeasurementRecord>& rows) {
  WidthLawFit out;
  std::map<double, std::vector<std::pair<double, double>>> by_alpha;
  for (const auto& r : rows)
    if (std::isfinite(r.width_mean) && r.width_mean > 0.0 && r.eps > 0.0) by_alpha[r.alpha].emplace_back(r.eps, r.width_mean);
  std::vector<std::pair<double, double>> exps;
  for (const auto& [alpha, pts] : by_alpha) {
    try {
      const PowerLawFit f = fit_power_law(pts);
      out.per_alpha.push_back({alpha, f.a, f.b, f.residual, f.n_points});
      exps.emplace_back(alpha, f.a);
    } catch (const Error& e) {
      out.notes.push_back("alpha=" + format_number(alpha) + ": " + e.what());
    }
  }
  try {
    const ExponentModelFit m = fit_exponent_model(exps);
    out.kappa1 = m.kappa1;
    out.kappa2 = m.kappa2;
    out.residual = m.residual;
  } catch (const Error& e) {
    out.notes.push_back(std::string("exponent model: ") + e.what());
  }
  return out;
}

std::string width_law_json(const WidthLawFit& fit, const std::string& hash) {
  ojson j;
  j["config_hash"] = hash;
  j["per_alpha"] = ojson::array();
  for (const auto& p : fit.per_alpha)
    j["per_alpha"].push_back({{"alpha", p.alpha}, {"a", p.a}, {"b", p.b}, {"rms_log_residual", p.residual}, {"n", p.n}});
  auto num = [](double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); };
  j["kappa1"] = num(fit.kappa1);
  j["kappa2"] = num(fit.kappa2);
  j["model_rms"] = num(fit.residual);
  j["reference"] = {{"kappa1", kWidthKappa1}, {"kappa2", kWidthKappa2}};
  j["notes"] = fit.notes;
  return j.dump(2);
}

}  // namespace fracac
