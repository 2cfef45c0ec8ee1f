#pragma once
#include <memory>
#include <string>
#include <vector>

#include "fracac/fem1d.hpp"
#include "fracac/field.hpp"

namespace fracac {

/// Tensor mesh of the truncated cylinder (-L, L) x (0, Y).
struct CylinderMesh {
  double L = 10;
  std::size_t x_elements = 0;
  double Y = 8;
  double sigma = 0.125;
  int n_layers = 8;
  int p_x = 3;
  int p_y = 4;
  std::vector<double> x_breaks;
  std::vector<double> y_breaks;  // 0, Y sigma^{n-1}, ..., Y sigma, Y

  double h_x() const { return 2.0 * L / static_cast<double>(x_elements); }
};

CylinderMesh build_mesh(double L, double h_x, double Y = 8.0, double sigma = 0.125, int n_layers = 8,
                        int p_x = 3, int p_y = 4);
CylinderMesh build_mesh_elements(double L, std::size_t x_elements, double Y = 8.0, double sigma = 0.125,
                                 int n_layers = 8, int p_x = 3, int p_y = 4);

/// One-dimensional factors of the extension bilinear forms:
/// S = Kx (x) My + Mx (x) Ky (weight y^{1-alpha}), M_tr = Mx (x) e0 e0^T.
struct ExtensionFactors {
  std::unique_ptr<fem::Space1D> xs, ys;
  fem::WeightedMatrices x, y;
  double alpha = 0;
  std::vector<std::string> warnings;
};

/// Relative quadrature error above which assembly records a warning.
inline constexpr double kQuadratureWarn = 1e-9;

ExtensionFactors assemble_factors(const CylinderMesh& mesh, double alpha);

/// Full tensor matrices (dof index = ix * ny + iy); meant for small meshes.
struct TensorSystem {
  fem::SparseMatrix S;
  fem::SparseMatrix M_tr;
};
TensorSystem assemble(const ExtensionFactors& f);

/// Full coefficient vector over the tensor space, dof index ix * ny + iy.
struct ExtensionState {
  std::vector<double> dofs;
  double time = 0;
};

/// Exact direct solver for (c S + M_tr) U = (Mx r) (x) e0, built once per c.
///
/// The y-pencil (c Ky + E0, c My) is diagonalized in long double; each of the
/// resulting shifted x-problems Kx + nu_k Mx is banded and factored once.
class ExtensionOperator {
 public:
  ExtensionOperator(const ExtensionFactors& f, double c);
  ~ExtensionOperator();
  ExtensionOperator(ExtensionOperator&&) noexcept;

  double c() const { return c_; }
  std::size_t modes() const { return nu_.size(); }
  /// Trace of the solution for nodal right-hand side r at the x-nodes.
  void solve_trace(const std::vector<double>& r, std::vector<double>& trace) const;
  /// Full solution.
  std::vector<double> solve_full(const std::vector<double>& r) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double c_;
  std::vector<double> nu_;
};

struct ExtensionConfig {
  double eps = 1, alpha = 1, dt = 0.05;
  CylinderMesh mesh;
  Grid1D grid;  // measurement grid
};

/// SBDF2 stepper for the extension system, state = trace at the x-nodes. The
/// first step is backward Euler on the same weak form.
class ExtensionStepper : public Stepper {
 public:
  /// u0 is sampled at the FE x-nodes.
  ExtensionStepper(const ExtensionConfig& cfg, const std::function<double(double)>& u0);
  ~ExtensionStepper() override;

  const Grid1D& grid() const override { return cfg_.grid; }
  double dt() const override { return cfg_.dt; }
  double time() const override { return time_; }
  long step_index() const override { return step_; }
  void advance() override;
  FieldState snapshot() const override;
  double distance_to_one() const override;
  double last_rate() const override { return rate_; }
  double value_at(double x) const override;

  const std::vector<double>& trace_nodes() const { return u_; }
  std::vector<double> x_nodes() const { return factors_.xs->node_coordinates(); }
  const ExtensionFactors& factors() const { return factors_; }
  /// Full discrete extension whose trace is the current state.
  ExtensionState lift() const;

 private:
  ExtensionConfig cfg_;
  ExtensionFactors factors_;
  std::unique_ptr<ExtensionOperator> op_be_, op_bdf_;
  std::vector<double> u_, u_prev_, n_prev_, r_, trace_;
  std::vector<std::size_t> grid_elem_;
  std::vector<double> grid_basis_;  // (p_x + 1) weights per grid point
  double time_ = 0;
  long step_ = 0;
  double rate_;
};

/// Evaluation of the y = 0 restriction of a full state on a measurement grid.
std::vector<double> trace(const ExtensionFactors& f, const ExtensionState& state, const Grid1D& grid);

/// Single SBDF2 step on full states (reference path built on ExtensionOperator).
ExtensionState step_sbdf2_ext(const ExtensionState& state_k, const ExtensionState& state_km1, double dt,
                              double eps, const ExtensionFactors& f);

/// Discrete Dirichlet-to-Neumann value for the x-eigenvalue lam: the minimum of
/// the y-energy int y^{1-alpha} (phi'^2 + lam phi^2) over phi(0) = 1, divided by d_alpha.
double discrete_dtn(const ExtensionFactors& f, double lam);

}  // namespace fracac
