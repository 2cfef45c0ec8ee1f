#pragma once
#include <memory>
#include <vector>

#include "fracac/field.hpp"
#include "fracac/spectral.hpp"

namespace fracac {

enum class Scheme { imex_euler, sbdf2 };

const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& s);

struct SolverConfig {
  double eps = 1.0;
  double alpha = 1.0;
  double dt = 0.05;
  Scheme scheme = Scheme::sbdf2;
  Grid1D grid;
};

/// Largest accepted step. The explicit nonlinearity is stable for SBDF2 below 2/3.
inline constexpr double kMaxDt = 0.5;
/// Abort threshold for ||u||_inf.
inline constexpr double kBlowupBound = 10.0;

void validate(const SolverConfig& cfg);

/// u - u^3
inline double reaction(double u) { return u - u * u * u; }

/// Reference single steps (two transforms each, no caching).
FieldState step_imex_euler(const CosineBasis& basis, const FieldState& state, const SolverConfig& cfg);
FieldState step_sbdf2(const CosineBasis& basis, const FieldState& state_k, const FieldState& state_km1,
                      const SolverConfig& cfg);

/// Time stepper working in cosine-coefficient space; keeps the previous
/// nonlinearity transform so each step costs two transforms.
class SpectralStepper : public Stepper {
 public:
  SpectralStepper(const SolverConfig& cfg, std::vector<double> u0,
                  std::shared_ptr<const CosineBasis> basis = nullptr);

  const Grid1D& grid() const override { return cfg_.grid; }
  double dt() const override { return cfg_.dt; }
  double time() const override { return time_; }
  long step_index() const override { return step_; }
  void advance() override;
  FieldState snapshot() const override { return {u_, time_, step_}; }
  double distance_to_one() const override;
  double last_rate() const override { return rate_; }
  double value_at(double x) const override;

  const std::vector<double>& values() const { return u_; }
  const std::vector<double>& coeffs() const { return c_; }
  const CosineBasis& basis() const { return *basis_; }
  const SolverConfig& config() const { return cfg_; }

 private:
  void nonlinear_coeffs(std::vector<double>& out);

  SolverConfig cfg_;
  std::shared_ptr<const CosineBasis> basis_;
  std::vector<double> u_, c_, c_prev_;
  std::vector<double> nhat_, nhat_prev_;
  std::vector<double> denom1_, denom2_;  // implicit diagonal for Euler and SBDF2
  std::vector<double> work_, u_old_;
  double time_ = 0.0;
  long step_ = 0;
  double rate_;
};

}  // namespace fracac
