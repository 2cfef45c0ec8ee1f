#include "fracac/fracac.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <new>

#include "fracac/error.hpp"
#include "fracac/harness.hpp"
#include "fracac/io.hpp"
#include "fracac/layer.hpp"
#include "fracac/plot.hpp"
#include "fracac/reduced_ode.hpp"
#include "fracac/specfun.hpp"

using ojson = nlohmann::ordered_json;
using namespace fracac;

struct fracac_layer {
  LayerSolution sol;
  LayerProfile profile;
  double residual;
  double tail_residual;
  explicit fracac_layer(LayerSolution s)
      : sol(std::move(s)), profile(sol), residual(stationarity_residual(sol)),
        tail_residual(tail_check(sol).value_or(std::nan(""))) {}
};

struct fracac_config {
  ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

fracac_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::domain: return FRACAC_E_DOMAIN;
    case ErrorKind::config: return FRACAC_E_CONFIG;
    case ErrorKind::shape: return FRACAC_E_SHAPE;
    case ErrorKind::blowup: return FRACAC_E_BLOWUP;
    case ErrorKind::convergence: return FRACAC_E_CONVERGENCE;
    case ErrorKind::singular: return FRACAC_E_SINGULAR;
    case ErrorKind::io: return FRACAC_E_IO;
    case ErrorKind::window: return FRACAC_E_WINDOW;
    case ErrorKind::internal: return FRACAC_E_INTERNAL;
  }
  return FRACAC_E_INTERNAL;
}

struct ArgumentError {
  const char* what;
};

void need(const void* p, const char* name) {
  if (!p) throw ArgumentError{name};
}

template <class F>
fracac_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return FRACAC_OK;
  } catch (const ArgumentError& e) {
    g_last_error = std::string("null argument: ") + e.what;
    return FRACAC_E_ARGUMENT;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FRACAC_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FRACAC_E_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(format_number(v)); }

ojson record_json(const MeasurementRecord& r) {
  return {{"eps", r.eps},         {"alpha", r.alpha},         {"method", r.method},
          {"speed", num(r.speed)}, {"s_hat", num(r.s_hat)},   {"t_col", num(r.t_col)},
          {"t_hat", num(r.t_hat)}, {"width_mean", num(r.width_mean)}, {"w_hat", num(r.w_hat)},
          {"gamma_used", num(r.gamma_used)}, {"t_col_estimate", num(r.t_col_estimate)},
          {"memory_min", num(r.memory_min)}, {"N", r.N}, {"dt", num(r.dt)}, {"error", r.error}};
}

ProgressFn progress_of(fracac_progress_fn fn, void* user) {
  if (!fn) return {};
  return [fn, user](const std::string& s) { fn(s.c_str(), user); };
}

std::string cache_path(const ExperimentConfig& cfg) { return join_path(cfg.output_dir, "layer_cache.json"); }

std::string layer_summary(const fracac_layer& l) {
  ojson j = {{"alpha", l.sol.alpha},
             {"L", l.sol.L},
             {"N", l.sol.v.size()},
             {"gamma", num(l.sol.gamma)},
             {"tail_p", num(l.sol.tail_p)},
             {"seminorm_sq", num(l.sol.seminorm_sq)},
             {"stationarity_residual", num(l.residual)},
             {"tail_residual", num(l.tail_residual)},
             {"settle_time", l.sol.settle_time},
             {"steps", l.sol.steps}};
  return j.dump();
}

CollisionReport ode_run(const double* centers, size_t n, double eps, double alpha, double gamma, double t_max,
                        ojson& summary) {
  need(centers, "centers");
  const CenterSystem sys = make_center_system(std::vector<double>(centers, centers + n), eps, alpha, gamma);
  validate(sys);
  const CollisionReport rep = integrate_centers(sys, t_max);
  double tc = std::nan("");
  if (n == 2) tc = closed_form_tc(sys.centers[0] - sys.centers[1], alpha, gamma, eps, TimeConvention::pde);
  summary = {{"n", n},
             {"eps", eps},
             {"alpha", alpha},
             {"gamma", gamma},
             {"collided", rep.collided},
             {"t_collision", num(rep.t_collision)},
             {"colliding_index", rep.colliding_index},
             {"closed_form_tc", num(tc)},
             {"relative_difference", num(std::abs(rep.t_collision - tc) / tc)},
             {"accepted_steps", rep.accepted_steps},
             {"min_gap", num(rep.min_gap)}};
  return rep;
}

}  // namespace

extern "C" {

const char* fracac_version(void) { return "1.0.0"; }

const char* fracac_last_error(void) { return g_last_error.c_str(); }

const char* fracac_status_name(fracac_status s) {
  switch (s) {
    case FRACAC_OK: return "ok";
    case FRACAC_E_DOMAIN: return "domain";
    case FRACAC_E_CONFIG: return "config";
    case FRACAC_E_SHAPE: return "shape";
    case FRACAC_E_BLOWUP: return "blowup";
    case FRACAC_E_CONVERGENCE: return "convergence";
    case FRACAC_E_SINGULAR: return "singular";
    case FRACAC_E_IO: return "io";
    case FRACAC_E_WINDOW: return "window";
    case FRACAC_E_INTERNAL: return "internal";
    case FRACAC_E_ARGUMENT: return "argument";
  }
  return "unknown";
}

void fracac_string_free(char* s) { std::free(s); }

fracac_status fracac_alpha_constants(double alpha, fracac_constants* out) {
  return guarded([&] {
    need(out, "out");
    const AlphaConstants c = alpha_constants(alpha);
    *out = {c.alpha, c.norm_factor, c.c_alpha, c.d_alpha, c.tail_p, c.fractional_available ? 1 : 0};
  });
}

fracac_status fracac_closed_form_tc(double d0, double alpha, double gamma, double eps, int pde_time, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = closed_form_tc(d0, alpha, gamma, eps, pde_time ? TimeConvention::pde : TimeConvention::rescaled);
  });
}

fracac_status fracac_layer_compute(double alpha, double L, size_t n, double dt, double tol, fracac_layer** out) {
  return guarded([&] {
    need(out, "out");
    LayerOptions opt;
    if (dt > 0) opt.dt = dt;
    if (tol > 0) opt.tol = tol;
    *out = new fracac_layer(compute_layer(alpha, L, n, opt));
  });
}

fracac_status fracac_layer_info_get(const fracac_layer* l, fracac_layer_info* out) {
  return guarded([&] {
    need(l, "layer");
    need(out, "out");
    const auto& s = l->sol;
    *out = {s.alpha,        s.L,           s.v.size(), s.gamma,  s.seminorm_sq, s.interior_seminorm, s.tail_term,
            s.tail_p,       s.settle_time, s.steps,    l->residual, l->tail_residual};
  });
}

fracac_status fracac_layer_profile(const fracac_layer* l, double* x, double* v, size_t n) {
  return guarded([&] {
    need(l, "layer");
    require(n == l->sol.v.size(), ErrorKind::shape, "profile buffer length must equal the layer size");
    for (size_t j = 0; j < n; ++j) {
      if (x) x[j] = l->sol.grid.node(j);
      if (v) v[j] = l->sol.v[j];
    }
  });
}

fracac_status fracac_layer_eval(const fracac_layer* l, double s, double* out) {
  return guarded([&] {
    need(l, "layer");
    need(out, "out");
    *out = l->profile(s);
  });
}

fracac_status fracac_layer_write(const fracac_layer* l, const char* dir, char** summary_json) {
  return guarded([&] {
    need(l, "layer");
    need(dir, "dir");
    ensure_directory(dir);
    const std::string summary = layer_summary(*l);
    std::string csv = "# " + summary + "\nx,v\n";
    for (size_t j = 0; j < l->sol.v.size(); ++j)
      csv += format_number(l->sol.grid.node(j)) + "," + format_number(l->sol.v[j]) + "\n";
    atomic_write(join_path(dir, "layer_" + format_number(l->sol.alpha) + ".csv"), csv);
    put(summary_json, summary);
  });
}

void fracac_layer_destroy(fracac_layer* l) { delete l; }

fracac_status fracac_ode_collision(const double* centers, size_t n, double eps, double alpha, double gamma,
                                   double t_max, fracac_ode_result* out) {
  return guarded([&] {
    need(out, "out");
    ojson s;
    const CollisionReport r = ode_run(centers, n, eps, alpha, gamma, t_max, s);
    double tc = std::nan("");
    if (n == 2) tc = s["closed_form_tc"].is_number() ? s["closed_form_tc"].get<double>() : tc;
    *out = {r.collided ? 1 : 0, r.t_collision, r.colliding_index, r.min_gap, r.accepted_steps, tc};
  });
}

fracac_status fracac_ode_write(const double* centers, size_t n, double eps, double alpha, double gamma, double t_max,
                               const char* dir, char** summary_json) {
  return guarded([&] {
    need(dir, "dir");
    ojson s;
    const CollisionReport r = ode_run(centers, n, eps, alpha, gamma, t_max, s);
    ensure_directory(dir);
    std::string csv = "t";
    for (size_t i = 0; i < n; ++i) csv += ",x_" + std::to_string(i + 1);
    csv += "\n";
    for (const auto& smp : r.trajectory) {
      csv += format_number(smp.t);
      for (double x : smp.x) csv += "," + format_number(x);
      csv += "\n";
    }
    atomic_write(join_path(dir, "ode_trajectory.csv"), csv);
    atomic_write(join_path(dir, "ode.json"), s.dump(2) + "\n");
    put(summary_json, s.dump());
  });
}

fracac_status fracac_presets(char** names) {
  return guarded([&] {
    need(names, "names");
    std::string s;
    for (const auto& n : preset_names()) s += n + "\n";
    *names = dup_string(s);
  });
}

fracac_status fracac_config_create(const char* preset, fracac_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new fracac_config{preset_config(preset ? preset : "custom")};
  });
}

fracac_status fracac_config_from_json(const char* json, fracac_config** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new fracac_config{config_from_json(json)};
  });
}

fracac_status fracac_config_set(fracac_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg, "config");
    need(key, "key");
    need(value, "value");
    set_option(cfg->cfg, key, value);
  });
}

fracac_status fracac_config_json(const fracac_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "config");
    need(out, "out");
    *out = dup_string(config_json(cfg->cfg));
  });
}

fracac_status fracac_config_hash(const fracac_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "config");
    need(out, "out");
    *out = dup_string(config_hash(cfg->cfg));
  });
}

void fracac_config_destroy(fracac_config* cfg) { delete cfg; }

fracac_status fracac_simulate(const fracac_config* handle, long snapshot_stride, fracac_progress_fn progress,
                              void* user, char** summary_json) {
  return guarded([&] {
    need(handle, "config");
    const ExperimentConfig& cfg = handle->cfg;
    validate(cfg);
    ensure_directory(cfg.output_dir);
    const std::string hash = config_hash(cfg);
    LayerCache cache(cache_path(cfg));
    const Method m = cfg.method == Method::both ? Method::spectral : cfg.method;

    // snapshots stream into a temporary file, renamed once the run is over
    const std::string snap = join_path(cfg.output_dir, "snapshots.csv");
    const std::string snap_tmp = snap + ".part";
    std::ofstream os;
    std::unique_ptr<StrideObserver> obs;
    std::vector<Observer*> extra;
    if (snapshot_stride > 0) {
      os.open(snap_tmp);
      require(bool(os), ErrorKind::io, "cannot open " + snap_tmp);
      os << "# config_hash=" << hash << "\nt,x,u\n";
      obs = std::make_unique<StrideObserver>(snapshot_stride, [&os, &cfg](const FieldState& st) {
        const Grid1D g = build_grid(cfg.L, st.values.size());
        const std::string t = format_number(st.time);
        for (std::size_t j = 0; j < st.values.size(); ++j)
          os << t << ',' << format_number(g.node(j)) << ',' << format_number(st.values[j]) << '\n';
      });
      extra.push_back(obs.get());
    }
    const MeasurementRecord rec =
        run_cell(cfg, cfg.eps_list.front(), cfg.alpha_list.front(), m, cache, progress_of(progress, user), extra);
    cache.save();
    std::vector<std::string> files = {"simulate.csv", "simulate.json"};
    if (os.is_open()) {
      os.close();
      std::filesystem::rename(snap_tmp, snap);
      files.push_back("snapshots.csv");
    }
    atomic_write(join_path(cfg.output_dir, "simulate.csv"), records_csv({rec}, hash));
    ojson j = {{"config_hash", hash}, {"record", record_json(rec)}, {"files", files}};
    atomic_write(join_path(cfg.output_dir, "simulate.json"), j.dump(2) + "\n");
    put(summary_json, j.dump());
  });
}

fracac_status fracac_sweep(const fracac_config* handle, fracac_progress_fn progress, void* user, char** summary_json) {
  return guarded([&] {
    need(handle, "config");
    const ExperimentConfig& cfg = handle->cfg;
    validate(cfg);
    ensure_directory(cfg.output_dir);
    const std::string hash = config_hash(cfg);
    LayerCache cache(cache_path(cfg));
    const auto rows = run_sweep(cfg, cache, progress_of(progress, user));
    atomic_write(join_path(cfg.output_dir, "sweep.csv"), records_csv(rows, hash));
    ojson j = {{"config_hash", hash}, {"config", ojson::parse(config_json(cfg))}, {"rows", ojson::array()}};
    for (const auto& r : rows) j["rows"].push_back(record_json(r));
    j["files"] = {"sweep.csv", "sweep.json"};
    atomic_write(join_path(cfg.output_dir, "sweep.json"), j.dump(2) + "\n");
    put(summary_json, j.dump());
  });
}

fracac_status fracac_compare(const fracac_config* handle, fracac_progress_fn progress, void* user,
                             char** summary_json) {
  return guarded([&] {
    need(handle, "config");
    const ExperimentConfig& cfg = handle->cfg;
    validate(cfg);
    ensure_directory(cfg.output_dir);
    const std::string hash = config_hash(cfg);
    LayerCache cache(cache_path(cfg));
    const auto rows = compare_methods(cfg, cache, progress_of(progress, user));
    atomic_write(join_path(cfg.output_dir, "compare.csv"), comparison_csv(rows, hash));
    std::vector<MeasurementRecord> recs;
    ojson j = {{"config_hash", hash}, {"rows", ojson::array()}};
    for (const auto& r : rows) {
      recs.push_back(r.spectral);
      recs.push_back(r.extension);
      j["rows"].push_back({{"eps", r.eps},
                           {"alpha", r.alpha},
                           {"d_speed", num(r.d_speed)},
                           {"d_s_hat", num(r.d_s_hat)},
                           {"d_t_col", num(r.d_t_col)},
                           {"d_width", num(r.d_width)},
                           {"comparable", r.comparable},
                           {"flagged", r.flagged}});
    }
    atomic_write(join_path(cfg.output_dir, "compare_records.csv"), records_csv(recs, hash));
    j["files"] = {"compare.csv", "compare_records.csv", "compare.json"};
    atomic_write(join_path(cfg.output_dir, "compare.json"), j.dump(2) + "\n");
    put(summary_json, j.dump());
  });
}

namespace {
std::string csv_hash(const std::string& text) {
  const CsvTable t = parse_csv(text);
  for (const auto& c : t.comments) {
    const auto pos = c.find("config_hash=");
    if (pos != std::string::npos) return c.substr(pos + 12);
  }
  return {};
}
}  // namespace

fracac_status fracac_fit_csv(const char* csv_path, const char* out_path, char** summary_json) {
  return guarded([&] {
    need(csv_path, "csv_path");
    const std::string text = read_file(csv_path);
    const std::string hash = csv_hash(text);
    const std::string js = width_law_json(fit_width_law(parse_records_csv(text)), hash);
    if (out_path) atomic_write(out_path, js + "\n");
    put(summary_json, js);
  });
}

fracac_status fracac_plot_csv(const char* csv_path, const char* out_dir, char** summary_json) {
  return guarded([&] {
    need(csv_path, "csv_path");
    need(out_dir, "out_dir");
    const std::string text = read_file(csv_path);
    std::vector<std::string> notes;
    const auto files = emit_plots(parse_records_csv(text), out_dir, csv_hash(text), &notes);
    ojson j = {{"files", files}, {"notes", notes}};
    put(summary_json, j.dump());
  });
}

}  // extern "C"
