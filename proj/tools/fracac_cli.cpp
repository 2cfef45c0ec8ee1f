// Command-line front end; talks to the library only through the C interface.
#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fracac/fracac.h"

namespace {

struct CString {
  char* p = nullptr;
  ~CString() { fracac_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

int check(fracac_status s) {
  if (s != FRACAC_OK) std::cerr << "error (" << fracac_status_name(s) << "): " << fracac_last_error() << "\n";
  return static_cast<int>(s);
}

void print_progress(const char* msg, void*) {
  std::fprintf(stderr, "%s\n", msg);
  std::fflush(stderr);
}

// Options that map one-to-one onto config keys.
struct ConfigFlags {
  std::string preset = "custom";
  std::string config_file;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> direct;
  bool dry_run = false;
  bool quiet = false;
};

void add_config_flags(CLI::App* app, ConfigFlags& f) {
  app->add_option("--preset", f.preset, "named preset (see --list-presets)");
  app->add_option("--config", f.config_file, "JSON config file (applied after the preset)");
  app->add_option("--set", f.sets, "override, key=value (repeatable, applied last)");
  app->add_flag("--dry-run", f.dry_run, "print the resolved config and hash, then exit");
  app->add_flag("-q,--quiet", f.quiet, "no progress output");
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"method", "spectral, extension or both"},
      {"L", "half length of the domain"},
      {"eps", "comma separated eps values"},
      {"alpha", "comma separated alpha values"},
      {"x0", "symmetric centers +-x0"},
      {"centers", "explicit pair of centers, comma separated"},
      {"N", "grid points (0: automatic)"},
      {"dt", "fixed time step (switches dt_rule to fixed)"},
      {"dt-cap", "upper bound of the automatic time step"},
      {"scheme", "imex_euler or sbdf2"},
      {"delta", "width threshold"},
      {"seed", "seed of the optional perturbation"},
      {"noise", "amplitude of the optional perturbation"},
      {"out", "output directory"},
      {"workers", "parallel cells (env FRACAC_WORKERS overrides)"},
  };
  for (const auto& [k, help] : keys) {
    app->add_option_function<std::string>(
        "--" + k, [&f, k = k](const std::string& v) {
          std::string key = k;
          for (auto& c : key)
            if (c == '-') c = '_';
          f.direct.emplace_back(key, v);
        },
        help);
  }
}

int build_config(const ConfigFlags& f, fracac_config** cfg) {
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) {
      std::cerr << "cannot read " << f.config_file << "\n";
      return FRACAC_E_IO;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    if (int rc = check(fracac_config_from_json(ss.str().c_str(), cfg))) return rc;
    if (f.preset != "custom")
      std::cerr << "note: --config replaces --preset " << f.preset << "\n";
  } else if (int rc = check(fracac_config_create(f.preset.c_str(), cfg))) {
    return rc;
  }
  for (const auto& [k, v] : f.direct)
    if (int rc = check(fracac_config_set(*cfg, k.c_str(), v.c_str()))) return rc;
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "--set expects key=value, got '" << kv << "'\n";
      return FRACAC_E_CONFIG;
    }
    if (int rc = check(fracac_config_set(*cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()))) return rc;
  }
  return 0;
}

using Runner = fracac_status (*)(const fracac_config*, fracac_progress_fn, void*, char**);

int run_experiment(const ConfigFlags& f, Runner fn, long stride = -1) {
  fracac_config* cfg = nullptr;
  int rc = build_config(f, &cfg);
  if (rc == 0) {
    if (f.dry_run) {
      CString js, hash;
      rc = check(fracac_config_json(cfg, &js.p));
      if (rc == 0) rc = check(fracac_config_hash(cfg, &hash.p));
      if (rc == 0) std::cout << js.str() << "\nconfig_hash " << hash.str() << "\n";
    } else {
      CString out;
      fracac_progress_fn cb = f.quiet ? nullptr : print_progress;
      rc = check(stride >= 0 ? fracac_simulate(cfg, stride, cb, nullptr, &out.p) : fn(cfg, cb, nullptr, &out.p));
      if (rc == 0) std::cout << out.str() << "\n";
    }
  }
  fracac_config_destroy(cfg);
  return rc;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) v.push_back(std::stod(item));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional Allen-Cahn solvers and experiment harness"};
  app.require_subcommand(0, 1);
  bool list_presets = false, version = false;
  app.add_flag("--list-presets", list_presets, "print preset names");
  app.add_flag("--version", version, "print the library version");

  ConfigFlags sim_f, sweep_f, cmp_f;
  long stride = 0;
  auto* sim = app.add_subcommand("simulate", "one PDE run (first eps and alpha of the config)");
  add_config_flags(sim, sim_f);
  sim->add_option("--snapshot-stride", stride, "write (t, x, u) every that many steps (0: off)");
  auto* sweep = app.add_subcommand("sweep", "all (eps, alpha) cells, measurement table");
  add_config_flags(sweep, sweep_f);
  auto* cmp = app.add_subcommand("compare", "spectral against extension solver");
  add_config_flags(cmp, cmp_f);

  double l_alpha = 0.9, l_L = 10.0, l_dt = 0.0, l_tol = 0.0;
  std::size_t l_N = 4096;
  std::string l_out = "out";
  auto* layer = app.add_subcommand("layer", "stationary layer profile and its constant");
  layer->add_option("--alpha", l_alpha, "order in (0, 2]")->required();
  layer->add_option("--L", l_L, "half length");
  layer->add_option("--N", l_N, "grid points");
  layer->add_option("--dt", l_dt, "pseudo time step");
  layer->add_option("--tol", l_tol, "stationarity tolerance");
  layer->add_option("--out", l_out, "output directory");

  std::string o_centers = "1,-1", o_out = "out";
  double o_eps = 0.01, o_alpha = 0.9, o_gamma = 0.0, o_tmax = 0.0;
  std::size_t o_layer_N = 4096;
  auto* ode = app.add_subcommand("ode", "reduced interface ODE until collision");
  ode->add_option("--centers", o_centers, "comma separated centers");
  ode->add_option("--eps", o_eps, "eps");
  ode->add_option("--alpha", o_alpha, "alpha in (0, 2)");
  ode->add_option("--gamma", o_gamma, "layer constant (0: computed)");
  ode->add_option("--layer-N", o_layer_N, "grid for the computed layer constant");
  ode->add_option("--t-max", o_tmax, "time limit (0: 10 x the two-interface estimate)");
  ode->add_option("--out", o_out, "output directory");

  std::string f_in, f_out;
  auto* fit = app.add_subcommand("fit", "width power laws and exponent model from a measurement CSV");
  fit->add_option("--input", f_in, "measurement CSV")->required();
  fit->add_option("--output", f_out, "JSON output path");

  std::string p_in, p_out = "out";
  auto* plot = app.add_subcommand("plot", "SVG figures from a measurement CSV");
  plot->add_option("--input", p_in, "measurement CSV")->required();
  plot->add_option("--out", p_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (version) std::cout << fracac_version() << "\n";
  if (list_presets) {
    CString names;
    if (int rc = check(fracac_presets(&names.p))) return rc;
    std::cout << names.str();
  }
  if (*sim) return run_experiment(sim_f, nullptr, stride);
  if (*sweep) return run_experiment(sweep_f, fracac_sweep);
  if (*cmp) {
    if (cmp_f.preset == "custom") cmp_f.direct.insert(cmp_f.direct.begin(), {"method", "both"});
    return run_experiment(cmp_f, fracac_compare);
  }
  if (*layer) {
    fracac_layer* h = nullptr;
    if (int rc = check(fracac_layer_compute(l_alpha, l_L, l_N, l_dt, l_tol, &h))) return rc;
    CString out;
    const int rc = check(fracac_layer_write(h, l_out.c_str(), &out.p));
    fracac_layer_destroy(h);
    if (rc == 0) std::cout << out.str() << "\n";
    return rc;
  }
  if (*ode) {
    std::vector<double> c;
    try {
      c = parse_doubles(o_centers);
    } catch (const std::exception&) {
      std::cerr << "bad --centers\n";
      return FRACAC_E_CONFIG;
    }
    if (o_gamma <= 0.0) {
      fracac_layer* h = nullptr;
      if (int rc = check(fracac_layer_compute(o_alpha, 10.0, o_layer_N, 0.0, 0.0, &h))) return rc;
      fracac_layer_info info{};
      fracac_layer_info_get(h, &info);
      fracac_layer_destroy(h);
      o_gamma = info.gamma;
    }
    if (o_tmax <= 0.0) {
      double dmin = INFINITY;
      std::vector<double> s = c;
      std::sort(s.begin(), s.end());
      for (std::size_t i = 0; i + 1 < s.size(); ++i) dmin = std::min(dmin, s[i + 1] - s[i]);
      double tc = 0.0;
      if (c.size() < 2 || check(fracac_closed_form_tc(dmin, o_alpha, o_gamma, o_eps, 1, &tc))) return FRACAC_E_CONFIG;
      o_tmax = 10.0 * tc;
    }
    CString out;
    if (int rc = check(fracac_ode_write(c.data(), c.size(), o_eps, o_alpha, o_gamma, o_tmax, o_out.c_str(), &out.p)))
      return rc;
    std::cout << out.str() << "\n";
    return 0;
  }
  if (*fit) {
    CString out;
    if (int rc = check(fracac_fit_csv(f_in.c_str(), f_out.empty() ? nullptr : f_out.c_str(), &out.p))) return rc;
    std::cout << out.str() << "\n";
    return 0;
  }
  if (*plot) {
    CString out;
    if (int rc = check(fracac_plot_csv(p_in.c_str(), p_out.c_str(), &out.p))) return rc;
    std::cout << out.str() << "\n";
    return 0;
  }
  if (!version && !list_presets) std::cout << app.help();
  return 0;
}
