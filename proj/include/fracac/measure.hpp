#pragma once
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracac/field.hpp"
#include "fracac/grid.hpp"

namespace fracac {

struct MeasureOptions {
  int fine_factor = 8;
  double delta = 0.1;
  int speed_samples = 100;
  double window_lo = 0.25;  // fractions of the collapse-time estimate
  double window_hi = 0.35;
  double collapse_tol = 1e-6;
  double memory_fraction = 0.05;
};

/// Sign changes of the piecewise-linear interpolant on a fine_factor-times
/// refined (monotone cubic) grid, sorted ascending.
std::vector<double> find_zeros(const Grid1D& grid, std::span<const double> values, int fine_factor = 8);

/// Lengths of the maximal intervals where min(u)+delta < u < max(u)-delta.
/// Empty optional when max(u) - min(u) <= 2 delta (no measurable interface).
std::optional<std::vector<double>> interface_widths(const Grid1D& grid, std::span<const double> values,
                                                    double delta = 0.1, int fine_factor = 8);

/// sqrt(h sum (u_j - 1)^2)
double distance_to_one(const Grid1D& grid, std::span<const double> values);

struct Renormalized {
  double s_hat, t_hat, w_hat;
};

/// s_hat = C_a |x1-x2|^a s / eps^{1+a}, t_hat = (eps/d0)^{1+a} 2(1+a)/C_a t_col,
/// w_hat = w eps^{0.168298/a - 1.11709}.
Renormalized renormalize(double speed, double gap, double t_col, double width, double eps, double alpha,
                         double d0);

inline constexpr double kWidthKappa1 = -0.168298;
inline constexpr double kWidthKappa2 = 1.11709;

struct SpeedSample {
  double t = 0;
  std::vector<double> zeros;
  std::vector<double> widths;
};

/// Samples zeros and widths at equispaced interior times of (lo, hi).
class WindowSampler : public Observer {
 public:
  WindowSampler(const Grid1D& grid, double t_lo, double t_hi, const MeasureOptions& opt);
  bool due(const Stepper& s) const override;
  void observe(const FieldState& st) override;

  const std::vector<SpeedSample>& samples() const { return samples_; }
  double target(std::size_t i) const;
  std::size_t planned() const { return n_; }

 private:
  Grid1D grid_;
  double lo_, hi_;
  std::size_t n_;
  std::size_t next_ = 0;
  MeasureOptions opt_;
  std::vector<SpeedSample> samples_;
};

struct SpeedResult {
  double speed = 0;
  double gap = 0;  // distance between the tracked zero and its nearest neighbour, mid-window
  double width_mean = 0;
  std::size_t samples = 0;
  std::vector<double> track;  // tracked zero positions
  std::vector<double> times;
};

/// Mean |dx/dt| of the rightmost zero, followed by nearest-neighbour matching.
/// Throws ErrorKind::window when the tracked zero is lost.
SpeedResult measure_speed(const std::vector<SpeedSample>& samples);

/// Running record of u(x_c, t) reduced to per-chunk minima.
class MemoryProbe : public Observer {
 public:
  explicit MemoryProbe(double x_c, long chunk = 16) : x_c_(x_c), chunk_(chunk) {}
  bool due(const Stepper&) const override { return false; }
  void observe(const FieldState&) override {}
  void after_step(const Stepper& s) override;

  /// min of u(x_c, t) over [(1 - fraction) t_end, t_end]
  double min_before(double t_end, double fraction) const;

 private:
  struct Chunk {
    double t0, t1, vmin;
  };
  double x_c_;
  long chunk_;
  long count_ = 0;
  std::vector<Chunk> chunks_;
};

struct MeasurementRecord {
  double eps = 0, alpha = 0, L = 0;
  std::string method;
  std::vector<double> zeros;   // mid-window
  std::vector<double> widths;  // mid-window
  double speed = nan(), s_hat = nan(), t_col = nan(), t_hat = nan();
  double width_mean = nan(), w_hat = nan(), gamma_used = nan();
  double gap = nan(), d0 = nan(), t_col_estimate = nan(), memory_min = nan();
  double dt = nan();
  std::size_t N = 0;
  std::size_t sample_count = 0;
  std::string error;

  static double nan() { return std::numeric_limits<double>::quiet_NaN(); }
};

struct MeasurePlan {
  double eps = 0, alpha = 0, gamma = 0, d0 = 0;
  double t_col_estimate = 0;  // <= 0: no speed window
  bool stop_after_window = false;
  double max_time = 0;
  double x_c = 0;
  MeasureOptions options;
  std::vector<Observer*> extra_observers;  // e.g. snapshot writers
};

/// Runs the stepper with window sampling, collapse detection and the memory
/// probe attached, then fills a record. Measurement failures (lost zero,
/// timeout) are written to `error`; solver exceptions propagate.
MeasurementRecord measure_run(Stepper& stepper, const MeasurePlan& plan);

}  // namespace fracac
