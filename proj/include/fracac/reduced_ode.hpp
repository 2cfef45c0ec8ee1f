#pragma once
#include <vector>

namespace fracac {

/// Interface centers x_1 > x_2 > ... > x_{2K} with alternating orientations
/// zeta_i = +1 (odd i), -1 (even i), evolving in the PDE time variable.
struct CenterSystem {
  std::vector<double> centers;
  std::vector<int> zeta;
  double eps = 1.0;
  double alpha = 1.0;
  double gamma = 1.0;
};

/// Builds a system from centers given in any order (sorted descending here).
CenterSystem make_center_system(std::vector<double> centers, double eps, double alpha, double gamma);

void validate(const CenterSystem& sys);

/// dx_i/dt; throws ErrorKind::singular on coincident or misordered centers.
std::vector<double> center_velocities(const CenterSystem& sys);
void center_velocities(const CenterSystem& sys, const std::vector<double>& x, std::vector<double>& dxdt);

struct OdeOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  double gap_rel = 1e-6;     // event when min gap < gap_rel * d0
  double bisect_rel = 1e-8;  // relative precision of the event time
  long sample_stride = 1;    // keep every n-th accepted step in the trajectory
};

struct TrajectorySample {
  double t = 0;
  std::vector<double> x;
};

struct CollisionReport {
  bool collided = false;
  double t_collision = 0;    // event time (or last valid time without collision)
  int colliding_index = -1;  // i with x_{i+1} meeting x_i (1-based, as in the model)
  std::vector<int> zeta;
  std::vector<TrajectorySample> trajectory;
  long accepted_steps = 0;
  double min_gap = 0;
};

/// Adaptive Dormand-Prince 4(5) integration up to t_max with collision detection.
CollisionReport integrate_centers(const CenterSystem& sys, double t_max, const OdeOptions& opt = {});

/// Plain signed-time flow map without event handling.
std::vector<double> flow_centers(const CenterSystem& sys, double t_end, double abs_tol = 1e-13,
                                 double rel_tol = 1e-12);

enum class TimeConvention { pde, rescaled };

/// Closed-form two-interface collision time C_a d0^{1+a} / (2 (1+a) gamma),
/// times eps^{-(1+a)} in the PDE convention.
double closed_form_tc(double d0, double alpha, double gamma, double eps, TimeConvention conv);

/// sum_i sgn(zeta_i (x - x_i(t))) + 1 with sgn(0) = 0; centers at time t are
/// linearly interpolated from the recorded trajectory.
double sharp_profile(double t, double x, const CollisionReport& report);

}  // namespace fracac
