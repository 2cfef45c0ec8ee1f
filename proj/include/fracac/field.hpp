#pragma once
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fracac/grid.hpp"

namespace fracac {

struct FieldState {
  std::vector<double> values;  // nodal values on the measurement grid
  double time = 0.0;
  long step_index = 0;
};

/// Common face of the spectral and extension discretizations, as seen by the run
/// loop and the measurement observers.
class Stepper {
 public:
  virtual ~Stepper() = default;
  virtual const Grid1D& grid() const = 0;
  virtual double dt() const = 0;
  virtual double time() const = 0;
  virtual long step_index() const = 0;
  /// One time step; the first call of a two-step scheme performs the startup step.
  virtual void advance() = 0;
  /// Nodal values on grid() at the current time.
  virtual FieldState snapshot() const = 0;
  /// ||u - 1|| in L2(-L, L).
  virtual double distance_to_one() const = 0;
  /// ||u^{k+1} - u^k||_inf / dt of the last step (inf before the first step).
  virtual double last_rate() const = 0;
  /// Point evaluation of the current field.
  virtual double value_at(double x) const = 0;
};

class Observer {
 public:
  virtual ~Observer() = default;
  /// Whether observe() wants a snapshot of the current state.
  virtual bool due(const Stepper& s) const = 0;
  virtual void observe(const FieldState& state) = 0;
  /// Cheap per-step hook that does not require a snapshot.
  virtual void after_step(const Stepper&) {}
};

/// Calls a function on every `stride`-th step (including step 0).
class StrideObserver : public Observer {
 public:
  template <class F>
  StrideObserver(long stride, F&& f) : stride_(stride < 1 ? 1 : stride), fn_(std::forward<F>(f)) {}
  bool due(const Stepper& s) const override { return s.step_index() % stride_ == 0; }
  void observe(const FieldState& st) override { fn_(st); }

 private:
  long stride_;
  std::function<void(const FieldState&)> fn_;
};

struct StopRule {
  enum class Kind { max_time, collapse, stationarity };
  Kind kind = Kind::max_time;
  double t_max = 0.0;
  double tol = 0.0;  // collapse: L2 distance to 1; stationarity: rate

  static StopRule until(double t) { return {Kind::max_time, t, 0.0}; }
  static StopRule collapse(double t_max, double tol = 1e-6) { return {Kind::collapse, t_max, tol}; }
  static StopRule stationary(double t_max, double tol = 1e-10) {
    return {Kind::stationarity, t_max, tol};
  }
};

struct RunEvent {
  double time = 0.0;
  long step = 0;
  std::string kind;
  double value = 0.0;
};

enum class RunOutcome { reached_time, collapsed, stationary, timeout };

struct RunResult {
  FieldState final_state;
  RunOutcome outcome = RunOutcome::reached_time;
  std::vector<RunEvent> events;
  double max_abs = 0.0;  // sup over observed snapshots and the final state
};

/// Drives a stepper until the stop rule fires. Stationarity that is never reached
/// raises ErrorKind::convergence; a collapse rule that runs out of time returns
/// RunOutcome::timeout.
RunResult run(Stepper& stepper, const StopRule& stop, std::span<Observer* const> observers = {});

double sup_norm(std::span<const double> v);

}  // namespace fracac
