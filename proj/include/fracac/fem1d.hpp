#pragma once
#include <Eigen/Sparse>
#include <functional>
#include <vector>

namespace fracac::fem {

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Jacobi rule on [-1, 1] for the weight (1-t)^a (1+t)^b (Golub-Welsch).
Quadrature gauss_jacobi(int n, double a, double b);
inline Quadrature gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

/// p+1 Gauss-Lobatto-Legendre points on [-1, 1], ascending.
std::vector<double> gll_points(int p);

/// Lagrange basis on the given reference nodes.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(std::vector<double> nodes);
  int degree() const { return static_cast<int>(nodes_.size()) - 1; }
  const std::vector<double>& nodes() const { return nodes_; }
  double value(int i, double t) const;
  double derivative(int i, double t) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> bary_;  // barycentric weights
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Continuous piecewise-polynomial space of degree p on a 1D partition, with
/// GLL nodal basis functions (global node g = e p + local i).
class Space1D {
 public:
  Space1D(std::vector<double> breaks, int p);
  int degree() const { return p_; }
  std::size_t elements() const { return breaks_.size() - 1; }
  std::size_t dofs() const { return elements() * p_ + 1; }
  const std::vector<double>& breaks() const { return breaks_; }
  const LagrangeBasis& basis() const { return basis_; }
  /// Physical coordinates of all global nodes.
  std::vector<double> node_coordinates() const;
  /// Element containing x (clamped to the mesh) and its reference coordinate.
  std::pair<std::size_t, double> locate(double x) const;
  double evaluate(const std::vector<double>& dofs, double x) const;

 private:
  std::vector<double> breaks_;
  int p_;
  LagrangeBasis basis_;
};

/// Stiffness and mass with weight w(x) on every element; `quad_for(e)` gives
/// the rule on [-1, 1] (already including any singular weight factor, see
/// `weight_in_rule`).
struct WeightedMatrices {
  SparseMatrix stiffness;
  SparseMatrix mass;
  double quadrature_error = 0;  // max relative change against a refined rule
};

/// Unweighted matrices, exact Gauss-Legendre.
WeightedMatrices assemble_plain(const Space1D& space);

/// Matrices for the weight y^{1-alpha}: Gauss-Jacobi on an element touching
/// y = 0, Gauss-Legendre with `smooth_points` nodes elsewhere. The reported
/// quadrature error compares against rules with 8 more points.
WeightedMatrices assemble_power_weight(const Space1D& space, double alpha, int jacobi_points,
                                       int smooth_points);

}  // namespace fracac::fem
