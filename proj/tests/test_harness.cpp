#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracac/error.hpp"
#include "fracac/harness.hpp"
#include "fracac/measure.hpp"
#include "fracac/plot.hpp"

using namespace fracac;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fracac_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

/// A fast two-interface cell: eps 0.1, alpha 1.5, centers +-1 on (-5, 5).
ExperimentConfig small_config() {
  ExperimentConfig c;
  c.L = 5;
  c.eps_list = {0.1};
  c.alpha_list = {1.5};
  c.centers = {1.0, -1.0};
  c.layer_N = 1024;
  c.N = 256;
  c.dt_cap = 0.1;
  return c;
}

}  // namespace

TEST_CASE("presets encode the experiment parameters") {
  const auto names = preset_names();
  for (const char* n : {"fig-metastability", "fig-speed", "fig-width", "fig-compare", "fig-alpha2"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  const auto meta = preset_config("fig-metastability");
  CHECK(meta.L == 10);
  CHECK(meta.eps_list == std::vector<double>{0.01});
  CHECK(meta.alpha_list == std::vector<double>{0.9});
  CHECK(config_centers(meta) == std::pair{1.0, -1.0});
  CHECK(meta.N == 8192);
  CHECK(meta.dt_rule == "scaled");
  CHECK(meta.dt_cap == 0.05);
  const auto speed = preset_config("fig-speed");
  CHECK(speed.eps_list == std::vector<double>{0.005, 0.01, 0.02});
  CHECK(speed.alpha_list == std::vector<double>{0.6, 0.9, 1.2, 1.5, 1.8});
  const auto width = preset_config("fig-width");
  CHECK(width.eps_list == std::vector<double>{0.005, 0.01, 0.02, 0.04});
  CHECK(width.alpha_list == std::vector<double>{0.8, 1.1, 1.4, 1.7, 1.9});
  const auto cmp = preset_config("fig-compare");
  CHECK(cmp.method == Method::both);
  CHECK(cmp.eps_list == std::vector<double>{0.01, 0.02});
  CHECK(cmp.alpha_list == std::vector<double>{0.6, 1.0, 1.5});
  const auto a2 = preset_config("fig-alpha2");
  CHECK(a2.L == 5);
  CHECK(a2.eps_list == std::vector<double>{0.3});
  CHECK(a2.alpha_list == std::vector<double>{2.0});
  CHECK(config_centers(a2) == std::pair{1.25, -1.25});
  CHECK_THROWS_AS(preset_config("nope"), Error);
}

TEST_CASE("configuration validation and overrides") {
  ExperimentConfig c;
  c.alpha_list.clear();
  try {
    validate(c);
    FAIL("expected a configuration error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
  }
  ExperimentConfig d;
  set_option(d, "eps", "0.01,0.02");
  set_option(d, "dt", "0.01");
  set_option(d, "x0", "3");
  CHECK(d.eps_list == std::vector<double>{0.01, 0.02});
  CHECK(d.dt_rule == "fixed");
  CHECK(d.dt_fixed == 0.01);
  CHECK(config_centers(d) == std::pair{3.0, -3.0});
  CHECK_THROWS_AS(set_option(d, "bogus", "1"), Error);
  CHECK_THROWS_AS(set_option(d, "L", "abc"), Error);
  ExperimentConfig e;
  set_option(e, "alpha", "2.5");
  CHECK_THROWS_AS(validate(e), Error);
}

TEST_CASE("time step and resolution rules") {
  ExperimentConfig c;
  CHECK(choose_dt(c, 3587.1) == doctest::Approx(0.05 * 0 + std::min(0.05, 1e-4 * 3587.1)));
  CHECK(choose_dt(c, 100) == doctest::Approx(0.01));
  c.dt_rule = "fixed";
  c.dt_fixed = 0.003;
  CHECK(choose_dt(c, 1e9) == 0.003);
  ExperimentConfig g;
  CHECK(grid_points(g, 0.01) == 4096);
  g.N = 300;
  CHECK(grid_points(g, 0.01) == 300);
  ExperimentConfig x;
  CHECK(extension_elements(x, 0.01) == 2000);
  CHECK(extension_elements(x, 0.001) == 8012);
}

TEST_CASE("config JSON round trip and hash") {
  ExperimentConfig c = preset_config("fig-width");
  c.seed = 42;
  c.noise = 1e-3;
  c.output_dir = "somewhere";
  const ExperimentConfig back = config_from_json(config_json(c));
  CHECK(config_json(back) == config_json(c));
  CHECK(config_hash(back) == config_hash(c));
  ExperimentConfig moved = c;
  moved.output_dir = "elsewhere";
  moved.workers = 7;
  CHECK(config_hash(moved) == config_hash(c));
  moved.delta = 0.01;
  CHECK(config_hash(moved) != config_hash(c));
  CHECK(config_hash(c).size() == 16);
  CHECK_THROWS_AS(config_from_json("{not json"), Error);
}

TEST_CASE("initial datum") {
  ExperimentConfig c;
  c.x0 = 2.5;
  const LayerSolution layer = compute_layer(0.9, 10, 1024);
  const auto u0 = initial_datum(c, layer, 0.1);
  CHECK(std::abs(u0(-9.5) - 1) < 0.05);
  CHECK(std::abs(u0(9.5) - 1) < 0.05);
  CHECK(std::abs(u0(2.5)) < 0.05);
  CHECK(std::abs(u0(-2.5)) < 0.05);
  CHECK(u0(0) < -0.9);
  for (double x = 0; x < 10; x += 0.173) CHECK(std::abs(u0(x) - u0(-x)) < 1e-10);
  ExperimentConfig tight;
  tight.x0 = 9.8;
  CHECK_THROWS_AS(initial_datum(tight, layer, 0.1), Error);
  ExperimentConfig close;
  close.centers = {0.1, -0.1};
  CHECK_THROWS_AS(initial_datum(close, layer, 0.1), Error);
}

TEST_CASE("layer cache persists") {
  const fs::path dir = scratch("cache");
  const std::string path = (dir / "layers.json").string();
  double g = 0;
  {
    LayerCache cache(path);
    g = cache.get(1.3, 10, 512)->gamma;
    CHECK(cache.get(1.3, 10, 512) == cache.get(1.3, 10, 512));
    cache.save();
  }
  LayerCache again(path);
  CHECK(again.size() == 1);
  CHECK(again.get(1.3, 10, 512)->gamma == g);
}

TEST_CASE("sweeps are deterministic and the table round trips") {
  const ExperimentConfig c = small_config();
  LayerCache cache;
  const auto a = run_sweep(c, cache);
  LayerCache fresh;
  const auto b = run_sweep(c, fresh);
  REQUIRE(a.size() == 1);
  INFO("error: " << a[0].error);
  CHECK(a[0].error.empty());
  CHECK(a[0].t_col > 0);
  CHECK(a[0].speed > 0);
  CHECK(a[0].sample_count == 100);
  const std::string csv = records_csv(a, config_hash(c));
  CHECK(csv == records_csv(b, config_hash(c)));
  CHECK(csv.rfind("# config_hash=" + config_hash(c), 0) == 0);
  CHECK(csv.find("eps,alpha,L,method,speed,s_hat,t_col,t_hat,width_mean,w_hat,gamma_used,samples") != std::string::npos);
  const auto parsed = parse_records_csv(csv);
  REQUIRE(parsed.size() == 1);
  CHECK(records_csv(parsed, config_hash(c)) == csv);
  // s_hat recomputed from the stored fields
  const Renormalized r = renormalize(a[0].speed, a[0].gap, a[0].t_col, a[0].width_mean, 0.1, 1.5, 2);
  CHECK(r.s_hat == doctest::Approx(a[0].s_hat).epsilon(1e-12));

  const ComparisonRow self = compare_records(a[0], a[0]);
  CHECK(self.comparable);
  CHECK(self.d_speed == 0);
  CHECK(self.d_t_col == 0);
  CHECK(self.d_width == 0);
}

TEST_CASE("parallel sweep merges in cell order") {
  ExperimentConfig c = small_config();
  c.alpha_list = {1.7, 1.5};
  c.window_only = true;
  LayerCache c1, c2;
  const auto serial = run_sweep(c, c1);
  c.workers = 2;
  const auto parallel = run_sweep(c, c2);
  REQUIRE(parallel.size() == 2);
  CHECK(parallel[0].alpha == 1.7);
  CHECK(records_csv(serial, "") == records_csv(parallel, ""));
}

TEST_CASE("run failures land in the error column") {
  ExperimentConfig c = small_config();
  c.max_time = 5;  // far short of the collapse
  LayerCache cache;
  const auto rows = run_sweep(c, cache);
  REQUIRE(rows.size() == 1);
  CHECK_FALSE(rows[0].error.empty());
}

TEST_CASE("plots") {
  std::vector<MeasurementRecord> rows;
  for (double e : {0.005, 0.01, 0.02})
    for (double a : {0.8, 1.2, 1.6}) {
      MeasurementRecord r;
      r.eps = e;
      r.alpha = a;
      r.s_hat = 1 + 0.1 * a;
      r.t_hat = 1 / (1 + 0.1 * a);
      r.gamma_used = 1 + 0.1 * a;
      r.width_mean = 2 * std::pow(e, -0.17 / a + 1.1);
      rows.push_back(r);
    }
  const fs::path dir = scratch("plots");
  std::vector<std::string> notes;
  const auto files = emit_plots(rows, dir.string(), "abc123", &notes);
  CHECK(files.size() == 3);
  CHECK(notes.empty());
  const std::string speed = slurp(dir / "speed.svg");
  CHECK(count(speed, "<polyline") == 4);  // one per eps plus gamma
  CHECK(speed.find("config_hash=abc123") != std::string::npos);
  const std::string width = slurp(dir / "width.svg");
  CHECK(width.find("data-x-scale=\"log\" data-y-scale=\"log\"") != std::string::npos);
  CHECK(count(width, "<polyline") == 6);  // data and fit line per alpha
  CHECK(slurp(dir / "collapse_time.svg").find("1/gamma") != std::string::npos);

  // one alpha without widths: its series is dropped with a note
  for (auto& r : rows)
    if (r.alpha == 1.6) r.width_mean = MeasurementRecord::nan();
  notes.clear();
  emit_plots(rows, dir.string(), "abc123", &notes);
  CHECK(count(slurp(dir / "width.svg"), "<polyline") == 4);
  CHECK_FALSE(notes.empty());
}

TEST_CASE("classical equation stays metastable, then collapses") {
  ExperimentConfig c = preset_config("fig-alpha2");
  LayerCache cache;
  std::size_t zeros_at_1771 = 0;
  bool seen = false;
  StrideObserver probe(1, [&](const FieldState& s) {
    if (!seen && s.time >= 1771) {
      seen = true;
      zeros_at_1771 = find_zeros(build_grid(5, 512), s.values).size();
    }
  });
  const MeasurementRecord r = run_cell(c, 0.3, 2.0, Method::spectral, cache, {}, {&probe});
  CHECK(seen);
  CHECK(zeros_at_1771 == 2);
  CHECK(r.t_col > 1771);
  CHECK(r.t_col < 177216);
  CHECK(r.memory_min < -0.5);
}
