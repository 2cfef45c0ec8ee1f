#pragma once
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fracac/layer.hpp"
#include "fracac/measure.hpp"
#include "fracac/spectral_solver.hpp"

namespace fracac {

enum class Method { spectral, extension, both };
const char* method_name(Method m);
Method parse_method(const std::string& s);

/// Everything that defines an experiment. Field names double as JSON keys and
/// as `key=value` override names.
struct ExperimentConfig {
  std::string preset = "custom";
  Method method = Method::spectral;
  double L = 10.0;
  std::vector<double> eps_list{0.01};
  std::vector<double> alpha_list{0.9};
  double x0 = 2.5;               // symmetric centers +-x0 unless `centers` is set
  std::vector<double> centers;   // explicit pair, any order
  std::size_t N = 0;             // 0: smallest power of two with h <= eps/2
  std::size_t layer_N = 4096;
  double layer_L = 10.0;
  std::string dt_rule = "scaled";  // scaled: min(dt_cap, 1e-4 t_col estimate); fixed: dt_fixed
  double dt_cap = 0.05;
  double dt_fixed = 0.05;
  Scheme scheme = Scheme::sbdf2;
  double delta = 0.1;
  int fine_factor = 8;
  std::uint64_t seed = 0;        // drives the optional initial perturbation
  double noise = 0.0;            // amplitude of a seeded uniform perturbation of u0
  std::string output_dir = "out";
  int workers = 1;
  bool window_only = false;      // stop after the speed/width window (no t_col)
  double max_time = 0.0;         // 0: 3 x collapse estimate + 100
  double t_col_estimate = 0.0;   // 0: closed-form two-interface prediction
  double gamma_override = 0.0;   // 0: gamma of the computed layer
  // extension discretization
  std::size_t ext_elements = 0;  // 0: min(ceil(2L/eps), 8012)
  int p_x = 3;
  int p_y = 4;
  int n_layers = 8;
  double Y = 8.0;
  double sigma = 0.125;
};

ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();
void validate(const ExperimentConfig& cfg);

/// Applies one `key=value` override (lists are comma separated).
void set_option(ExperimentConfig& cfg, const std::string& key, const std::string& value);

std::string config_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);
/// Hash of the canonical JSON form, excluding fields that do not affect numbers
/// (output_dir, workers).
std::string config_hash(const ExperimentConfig& cfg);

/// Worker count after the FRACAC_WORKERS environment override.
int effective_workers(const ExperimentConfig& cfg);

/// Pair of centers (right, left) for the configuration.
std::pair<double, double> config_centers(const ExperimentConfig& cfg);

/// u0(x) = v((x - x1)/eps) + v(-(x - x2)/eps) + 1 with x1 > x2; throws when the
/// centers are closer than 5 eps to each other or to the boundary.
std::function<double(double)> initial_datum(const ExperimentConfig& cfg, const LayerSolution& layer, double eps);

/// Layer solutions keyed by (alpha, L, N, tol), persisted as JSON.
class LayerCache {
 public:
  explicit LayerCache(std::string path = {});
  std::shared_ptr<const LayerSolution> get(double alpha, double L, std::size_t N, const LayerOptions& opt = {});
  void save() const;
  std::size_t size() const;

 private:
  std::string path_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const LayerSolution>> entries_;
  std::map<std::string, std::shared_ptr<std::once_flag>> pending_;
};

using ProgressFn = std::function<void(const std::string&)>;

double choose_dt(const ExperimentConfig& cfg, double t_estimate);
std::size_t grid_points(const ExperimentConfig& cfg, double eps);
std::size_t extension_elements(const ExperimentConfig& cfg, double eps);

/// One (eps, alpha) run with the given discretization; measurement problems
/// and solver errors end up in `error`. `extra` observers ride along the run.
MeasurementRecord run_cell(const ExperimentConfig& cfg, double eps, double alpha, Method method, LayerCache& cache,
                           const ProgressFn& progress = {}, std::vector<Observer*> extra = {});

/// All cells in (eps outer, alpha inner) order, optionally in parallel.
std::vector<MeasurementRecord> run_sweep(const ExperimentConfig& cfg, LayerCache& cache,
                                         const ProgressFn& progress = {});

struct ComparisonRow {
  double eps = 0, alpha = 0;
  MeasurementRecord spectral, extension;
  double d_speed = MeasurementRecord::nan();  // relative differences w.r.t. spectral
  double d_s_hat = MeasurementRecord::nan();
  double d_t_col = MeasurementRecord::nan();
  double d_width = MeasurementRecord::nan();
  bool comparable = false;
  bool flagged = false;  // small alpha: larger differences expected
};

ComparisonRow compare_records(const MeasurementRecord& spectral, const MeasurementRecord& extension);
std::vector<ComparisonRow> compare_methods(const ExperimentConfig& cfg, LayerCache& cache,
                                           const ProgressFn& progress = {});

/// Measurement table with the fixed column order; `hash` goes into a comment line.
std::string records_csv(const std::vector<MeasurementRecord>& rows, const std::string& hash);
std::vector<MeasurementRecord> parse_records_csv(const std::string& text);
std::string comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& hash);

struct WidthLawFit {
  struct PerAlpha {
    double alpha;
    double a, b, residual;
    int n;
  };
  std::vector<PerAlpha> per_alpha;
  double kappa1 = MeasurementRecord::nan(), kappa2 = MeasurementRecord::nan(), residual = MeasurementRecord::nan();
  std::vector<std::string> notes;
};

/// Width power law per alpha (rows with finite positive width_mean), then the
/// exponent model across alphas.
WidthLawFit fit_width_law(const std::vector<MeasurementRecord>& rows);
std::string width_law_json(const WidthLawFit& fit, const std::string& hash);

}  // namespace fracac
