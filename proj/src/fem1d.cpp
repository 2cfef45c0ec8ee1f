#include "fracac/fem1d.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fracac/error.hpp"

namespace fracac::fem {

Quadrature gauss_jacobi(int n, double a, double b) {
  require(n >= 1, ErrorKind::config, "quadrature needs at least one point");
  require(a > -1.0 && b > -1.0, ErrorKind::domain, "Jacobi exponents must exceed -1");
  using LD = long double;
  const LD A = a, B = b;
  Eigen::Matrix<LD, Eigen::Dynamic, 1> diag(n), sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    const LD s = 2 * k + A + B;
    diag(k) = (k == 0) ? (B - A) / (A + B + 2) : (B * B - A * A) / (s * (s + 2));
  }
  for (int k = 1; k < n; ++k) {
    const LD s = 2 * k + A + B;
    const LD num = 4 * k * (k + A) * (k + B) * (k + A + B);
    sub(k - 1) = std::sqrt(num / (s * s * (s + 1) * (s - 1)));
  }
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const LD mu0 = std::pow(LD(2), A + B + 1) * std::tgamma(A + 1) * std::tgamma(B + 1) / std::tgamma(A + B + 2);
  if (n == 1) {
    q.nodes[0] = static_cast<double>(diag(0));
    q.weights[0] = static_cast<double>(mu0);
    return q;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>> es;
  es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  for (int i = 0; i < n; ++i) {
    q.nodes[i] = static_cast<double>(es.eigenvalues()(i));
    const LD v = es.eigenvectors()(0, i);
    q.weights[i] = static_cast<double>(mu0 * v * v);
  }
  return q;
}

std::vector<double> gll_points(int p) {
  require(p >= 1, ErrorKind::config, "polynomial degree must be >= 1");
  std::vector<double> x{-1.0};
  if (p >= 2) {
    // interior GLL points are the roots of P_p', i.e. Gauss-Jacobi(1,1) nodes
    const auto q = gauss_jacobi(p - 1, 1.0, 1.0);
    x.insert(x.end(), q.nodes.begin(), q.nodes.end());
  }
  x.push_back(1.0);
  return x;
}

LagrangeBasis::LagrangeBasis(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  const std::size_t n = nodes_.size();
  bary_.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t m = 0; m < n; ++m)
      if (m != i) bary_[i] /= (nodes_[i] - nodes_[m]);
}

double LagrangeBasis::value(int i, double t) const {
  double v = bary_[i];
  for (std::size_t m = 0; m < nodes_.size(); ++m)
    if (static_cast<int>(m) != i) v *= (t - nodes_[m]);
  return v;
}

double LagrangeBasis::derivative(int i, double t) const {
  double s = 0.0;
  const std::size_t n = nodes_.size();
  for (std::size_t m = 0; m < n; ++m) {
    if (static_cast<int>(m) == i) continue;
    double prod = bary_[i];
    for (std::size_t k = 0; k < n; ++k)
      if (static_cast<int>(k) != i && k != m) prod *= (t - nodes_[k]);
    s += prod;
  }
  return s;
}

Space1D::Space1D(std::vector<double> breaks, int p) : breaks_(std::move(breaks)), p_(p), basis_(gll_points(p)) {
  require(breaks_.size() >= 2, ErrorKind::config, "a 1D mesh needs at least one element");
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
    require(breaks_[i + 1] > breaks_[i], ErrorKind::config, "mesh breaks must increase strictly");
}

std::vector<double> Space1D::node_coordinates() const {
  std::vector<double> x(dofs());
  const auto& r = basis_.nodes();
  for (std::size_t e = 0; e < elements(); ++e) {
    const double a = breaks_[e], b = breaks_[e + 1];
    for (int i = 0; i <= p_; ++i) x[e * p_ + i] = a + (b - a) * (r[i] + 1.0) / 2.0;
  }
  x.front() = breaks_.front();
  x.back() = breaks_.back();
  return x;
}

std::pair<std::size_t, double> Space1D::locate(double x) const {
  const std::size_t ne = elements();
  std::size_t e;
  if (x <= breaks_.front()) {
    e = 0;
    x = breaks_.front();
  } else if (x >= breaks_.back()) {
    e = ne - 1;
    x = breaks_.back();
  } else {
    e = static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin()) - 1;
    e = std::min(e, ne - 1);
  }
  const double a = breaks_[e], b = breaks_[e + 1];
  return {e, 2.0 * (x - a) / (b - a) - 1.0};
}

double Space1D::evaluate(const std::vector<double>& dofs, double x) const {
  const auto [e, t] = locate(x);
  double v = 0.0;
  for (int i = 0; i <= p_; ++i) v += dofs[e * p_ + i] * basis_.value(i, t);
  return v;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Element matrices for integrand weight samples already folded into `wq`.
void element_pair(const LagrangeBasis& B, const Quadrature& q, const std::vector<double>& wmass,
                  const std::vector<double>& wstiff, Eigen::MatrixXd& Ke, Eigen::MatrixXd& Me) {
  const int n = B.degree() + 1;
  Ke.setZero(n, n);
  Me.setZero(n, n);
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const double t = q.nodes[k];
    Eigen::VectorXd phi(n), dphi(n);
    for (int i = 0; i < n; ++i) {
      phi(i) = B.value(i, t);
      dphi(i) = B.derivative(i, t);
    }
    Ke += wstiff[k] * dphi * dphi.transpose();
    Me += wmass[k] * phi * phi.transpose();
  }
}

void scatter(const Eigen::MatrixXd& E, std::size_t e, int p, Triplets& t) {
  for (int i = 0; i <= p; ++i)
    for (int j = 0; j <= p; ++j) t.emplace_back(static_cast<int>(e * p + i), static_cast<int>(e * p + j), E(i, j));
}

// Element matrices for the weight y^{1-alpha} on [a, b] with the given rule sizes.
void power_element(const LagrangeBasis& B, double a, double b, double alpha, int nj, int ns,
                   Eigen::MatrixXd& Ke, Eigen::MatrixXd& Me) {
  const double h = b - a;
  std::vector<double> wm, wk;
  Quadrature q;
  if (a == 0.0) {
    // y = b(1+t)/2, y^{1-alpha} = (b/2)^{1-alpha} (1+t)^{1-alpha}: the factor (1+t)^{1-alpha} is in the rule
    q = gauss_jacobi(nj, 0.0, 1.0 - alpha);
    const double s = std::pow(h / 2.0, 1.0 - alpha);
    for (double w : q.weights) {
      wm.push_back(w * s * h / 2.0);
      wk.push_back(w * s * 2.0 / h);
    }
  } else {
    q = gauss_legendre(ns);
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
      const double y = a + h * (q.nodes[k] + 1.0) / 2.0;
      const double wy = std::pow(y, 1.0 - alpha);
      wm.push_back(q.weights[k] * wy * h / 2.0);
      wk.push_back(q.weights[k] * wy * 2.0 / h);
    }
  }
  element_pair(B, q, wm, wk, Ke, Me);
}

}  // namespace

WeightedMatrices assemble_plain(const Space1D& space) {
  const int p = space.degree();
  const auto q = gauss_legendre(p + 2);
  Triplets tk, tm;
  for (std::size_t e = 0; e < space.elements(); ++e) {
    const double h = space.breaks()[e + 1] - space.breaks()[e];
    std::vector<double> wm, wk;
    for (double w : q.weights) {
      wm.push_back(w * h / 2.0);
      wk.push_back(w * 2.0 / h);
    }
    Eigen::MatrixXd Ke, Me;
    element_pair(space.basis(), q, wm, wk, Ke, Me);
    scatter(Ke, e, p, tk);
    scatter(Me, e, p, tm);
  }
  const auto n = static_cast<int>(space.dofs());
  WeightedMatrices out;
  out.stiffness.resize(n, n);
  out.mass.resize(n, n);
  out.stiffness.setFromTriplets(tk.begin(), tk.end());
  out.mass.setFromTriplets(tm.begin(), tm.end());
  return out;
}

WeightedMatrices assemble_power_weight(const Space1D& space, double alpha, int jacobi_points, int smooth_points) {
  if (!(alpha > 0.0 && alpha < 2.0)) fail(ErrorKind::domain, "extension weight needs alpha in (0, 2)");
  require(space.breaks().front() == 0.0, ErrorKind::config, "y-mesh must start at 0");
  const int p = space.degree();
  Triplets tk, tm;
  double err = 0.0;
  for (std::size_t e = 0; e < space.elements(); ++e) {
    const double a = space.breaks()[e], b = space.breaks()[e + 1];
    Eigen::MatrixXd Ke, Me, Kr, Mr;
    power_element(space.basis(), a, b, alpha, jacobi_points, smooth_points, Ke, Me);
    power_element(space.basis(), a, b, alpha, jacobi_points + 8, smooth_points + 8, Kr, Mr);
    err = std::max(err, (Ke - Kr).cwiseAbs().maxCoeff() / Kr.cwiseAbs().maxCoeff());
    err = std::max(err, (Me - Mr).cwiseAbs().maxCoeff() / Mr.cwiseAbs().maxCoeff());
    scatter(Ke, e, p, tk);
    scatter(Me, e, p, tm);
  }
  const auto n = static_cast<int>(space.dofs());
  WeightedMatrices out;
  out.stiffness.resize(n, n);
  out.mass.resize(n, n);
  out.stiffness.setFromTriplets(tk.begin(), tk.end());
  out.mass.setFromTriplets(tm.begin(), tm.end());
  out.quadrature_error = err;
  return out;
}

}  // namespace fracac::fem
