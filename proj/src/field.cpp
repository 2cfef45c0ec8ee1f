#include "fracac/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "fracac/error.hpp"

namespace fracac {

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

RunResult run(Stepper& stepper, const StopRule& stop, std::span<Observer* const> observers) {
  RunResult res;
  require(stop.t_max >= stepper.time(), ErrorKind::config, "stop time lies before the current time");
  // guard against accumulated roundoff in t = k dt
  const double t_end = stop.t_max - 1e-9 * stepper.dt();

  auto notify = [&]() {
    std::optional<FieldState> snap;
    for (Observer* o : observers) {
      o->after_step(stepper);
      if (o->due(stepper)) {
        if (!snap) {
          snap = stepper.snapshot();
          res.max_abs = std::max(res.max_abs, sup_norm(snap->values));
        }
        o->observe(*snap);
      }
    }
  };

  notify();
  for (;;) {
    if (stop.kind == StopRule::Kind::collapse && stepper.distance_to_one() < stop.tol) {
      res.outcome = RunOutcome::collapsed;
      res.events.push_back({stepper.time(), stepper.step_index(), "collapse", stepper.distance_to_one()});
      break;
    }
    if (stop.kind == StopRule::Kind::stationarity && stepper.step_index() > 0 &&
        stepper.last_rate() < stop.tol) {
      res.outcome = RunOutcome::stationary;
      res.events.push_back({stepper.time(), stepper.step_index(), "stationary", stepper.last_rate()});
      break;
    }
    if (stepper.time() >= t_end) {
      if (stop.kind == StopRule::Kind::stationarity)
        fail(ErrorKind::convergence, "no stationary state before t=" + std::to_string(stop.t_max) +
                                         " (last rate " + std::to_string(stepper.last_rate()) + ")");
      res.outcome = stop.kind == StopRule::Kind::collapse ? RunOutcome::timeout : RunOutcome::reached_time;
      res.events.push_back({stepper.time(), stepper.step_index(),
                            res.outcome == RunOutcome::timeout ? "timeout" : "end", 0.0});
      break;
    }
    stepper.advance();
    notify();
  }
  res.final_state = stepper.snapshot();
  res.max_abs = std::max(res.max_abs, sup_norm(res.final_state.values));
  return res;
}

}  // namespace fracac
