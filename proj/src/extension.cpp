#include "fracac/extension.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fracac/error.hpp"
#include "fracac/spectral_solver.hpp"
#include "fracac/specfun.hpp"

namespace fracac {

using fem::SparseMatrix;
using MatLD = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

namespace {

std::vector<double> y_breaks(double Y, double sigma, int n_layers) {
  std::vector<double> y{0.0};
  for (int j = 1; j <= n_layers; ++j) y.push_back(Y * std::pow(sigma, n_layers - j));
  y.back() = Y;
  return y;
}

MatLD to_dense_ld(const SparseMatrix& m) {
  MatLD d = MatLD::Zero(m.rows(), m.cols());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) d(it.row(), it.col()) = it.value();
  return d;
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  const auto nb = b.rows();
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib)
          t.emplace_back(static_cast<int>(ia.row() * nb + ib.row()), static_cast<int>(ia.col() * nb + ib.col()),
                         ia.value() * ib.value());
  SparseMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  k.setFromTriplets(t.begin(), t.end());
  return k;
}

void check_mesh_params(double L, double Y, double sigma, int n_layers, int p_x, int p_y) {
  require(L > 0.0 && Y > 0.0, ErrorKind::config, "mesh lengths must be positive");
  require(sigma > 0.0 && sigma < 1.0, ErrorKind::config, "grading factor must lie in (0, 1)");
  require(n_layers >= 1 && p_x >= 1 && p_y >= 1, ErrorKind::config, "layers and degrees must be >= 1");
}

}  // namespace

CylinderMesh build_mesh_elements(double L, std::size_t x_elements, double Y, double sigma, int n_layers, int p_x,
                                 int p_y) {
  check_mesh_params(L, Y, sigma, n_layers, p_x, p_y);
  require(x_elements >= 1, ErrorKind::config, "need at least one x-element");
  CylinderMesh m;
  m.L = L;
  m.x_elements = x_elements;
  m.Y = Y;
  m.sigma = sigma;
  m.n_layers = n_layers;
  m.p_x = p_x;
  m.p_y = p_y;
  m.x_breaks.resize(x_elements + 1);
  for (std::size_t e = 0; e <= x_elements; ++e)
    m.x_breaks[e] = -L + 2.0 * L * static_cast<double>(e) / static_cast<double>(x_elements);
  m.y_breaks = y_breaks(Y, sigma, n_layers);
  return m;
}

CylinderMesh build_mesh(double L, double h_x, double Y, double sigma, int n_layers, int p_x, int p_y) {
  check_mesh_params(L, Y, sigma, n_layers, p_x, p_y);
  require(h_x > 0.0, ErrorKind::config, "x mesh size must be positive");
  const double ratio = 2.0 * L / h_x;
  const double n = std::round(ratio);
  require(n >= 1.0 && std::abs(ratio - n) < 1e-9 * ratio, ErrorKind::config, "h_x must divide 2L exactly");
  return build_mesh_elements(L, static_cast<std::size_t>(n), Y, sigma, n_layers, p_x, p_y);
}

ExtensionFactors assemble_factors(const CylinderMesh& mesh, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) fail(ErrorKind::domain, "the extension solver needs alpha in (0, 2)");
  ExtensionFactors f;
  f.alpha = alpha;
  f.xs = std::make_unique<fem::Space1D>(mesh.x_breaks, mesh.p_x);
  f.ys = std::make_unique<fem::Space1D>(mesh.y_breaks, mesh.p_y);
  f.x = fem::assemble_plain(*f.xs);
  const int order = 2 * std::max(mesh.p_x, mesh.p_y) + 2;
  f.y = fem::assemble_power_weight(*f.ys, alpha, order, std::max(order, 28));
  if (f.y.quadrature_error > kQuadratureWarn)
    f.warnings.push_back("y-quadrature accuracy: estimated relative error " + std::to_string(f.y.quadrature_error) +
                         " at alpha=" + std::to_string(alpha));
  return f;
}

TensorSystem assemble(const ExtensionFactors& f) {
  const auto ny = f.ys->dofs();
  SparseMatrix e0(static_cast<int>(ny), static_cast<int>(ny));
  e0.insert(0, 0) = 1.0;
  TensorSystem t;
  t.S = kron(f.x.stiffness, f.y.mass) + kron(f.x.mass, f.y.stiffness);
  t.M_tr = kron(f.x.mass, e0);
  return t;
}

struct ExtensionOperator::Impl {
  using Factor = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>>;
  SparseMatrix Mx;
  std::vector<std::unique_ptr<Factor>> factors;
  std::vector<double> q;  // trace weights
  Eigen::MatrixXd W;      // generalized eigenvectors (columns)
  double renorm = 1.0;
};

ExtensionOperator::ExtensionOperator(const ExtensionFactors& f, double c) : impl_(std::make_unique<Impl>()), c_(c) {
  require(c > 0.0 && std::isfinite(c), ErrorKind::config, "extension operator needs a positive coefficient");
  const MatLD Ky = to_dense_ld(f.y.stiffness), My = to_dense_ld(f.y.mass);
  const auto ny = Ky.rows();
  MatLD A = static_cast<long double>(c) * Ky;
  A(0, 0) += 1.0L;
  MatLD B = static_cast<long double>(c) * My;
  // symmetric diagonal scaling tames the grading in y
  Eigen::Matrix<long double, Eigen::Dynamic, 1> d(ny);
  for (Eigen::Index i = 0; i < ny; ++i) d(i) = 1.0L / std::sqrt(B(i, i));
  const MatLD As = d.asDiagonal() * A * d.asDiagonal();
  const MatLD Bs = d.asDiagonal() * B * d.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<MatLD> ges(As, Bs);
  if (ges.info() != Eigen::Success) fail(ErrorKind::singular, "y-eigenproblem failed to converge");
  const MatLD W = d.asDiagonal() * ges.eigenvectors();
  nu_.resize(ny);
  impl_->W = W.cast<double>();
  impl_->q.resize(ny);
  long double check = 0.0L;
  for (Eigen::Index k = 0; k < ny; ++k) {
    nu_[k] = static_cast<double>(ges.eigenvalues()(k));
    require(nu_[k] > 0.0, ErrorKind::singular, "extension system is not positive definite");
    impl_->q[k] = static_cast<double>(W(0, k) * W(0, k));
    check += W(0, k) * W(0, k) / ges.eigenvalues()(k);
  }
  // sum q_k / nu_k = e0^T A^{-1} e0 = 1 exactly (A 1 = e0); remove roundoff so constants are preserved
  impl_->renorm = static_cast<double>(1.0L / check);
  for (double& q : impl_->q) q *= impl_->renorm;

  impl_->Mx = f.x.mass;
  for (Eigen::Index k = 0; k < ny; ++k) {
    SparseMatrix Ak = f.x.stiffness + nu_[k] * f.x.mass;
    auto fac = std::make_unique<Impl::Factor>(Ak);
    if (fac->info() != Eigen::Success) fail(ErrorKind::singular, "factorization of a shifted x-problem failed");
    impl_->factors.push_back(std::move(fac));
  }
}

ExtensionOperator::~ExtensionOperator() = default;
ExtensionOperator::ExtensionOperator(ExtensionOperator&&) noexcept = default;

void ExtensionOperator::solve_trace(const std::vector<double>& r, std::vector<double>& trace) const {
  const auto n = impl_->Mx.rows();
  require(static_cast<Eigen::Index>(r.size()) == n, ErrorKind::shape, "rhs does not match the x-space");
  const Eigen::Map<const Eigen::VectorXd> rv(r.data(), n);
  const Eigen::VectorXd g = impl_->Mx * rv;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < impl_->factors.size(); ++k) acc += impl_->q[k] * impl_->factors[k]->solve(g);
  trace.assign(acc.data(), acc.data() + n);
}

std::vector<double> ExtensionOperator::solve_full(const std::vector<double>& r) const {
  const auto n = impl_->Mx.rows();
  require(static_cast<Eigen::Index>(r.size()) == n, ErrorKind::shape, "rhs does not match the x-space");
  const Eigen::Map<const Eigen::VectorXd> rv(r.data(), n);
  const Eigen::VectorXd g = impl_->Mx * rv;
  const auto ny = impl_->W.rows();
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(ny, n);  // column ix holds the y-profile
  for (Eigen::Index k = 0; k < ny; ++k) {
    const Eigen::VectorXd v = impl_->renorm * impl_->W(0, k) * impl_->factors[k]->solve(g);
    U += impl_->W.col(k) * v.transpose();
  }
  return std::vector<double>(U.data(), U.data() + U.size());
}

ExtensionStepper::ExtensionStepper(const ExtensionConfig& cfg, const std::function<double(double)>& u0)
    : cfg_(cfg), factors_(assemble_factors(cfg.mesh, cfg.alpha)), rate_(std::numeric_limits<double>::infinity()) {
  require(cfg.eps > 0.0, ErrorKind::config, "eps must be positive");
  require(cfg.dt > 0.0 && cfg.dt <= kMaxDt, ErrorKind::config, "dt out of range");
  require(std::abs(cfg.grid.half_length() - cfg.mesh.L) < 1e-12 * cfg.mesh.L, ErrorKind::config,
          "measurement grid and mesh cover different intervals");
  const double da = d_alpha(cfg.alpha);
  const double z = cfg.dt * std::pow(cfg.eps, cfg.alpha) / da;
  op_be_ = std::make_unique<ExtensionOperator>(factors_, z);
  op_bdf_ = std::make_unique<ExtensionOperator>(factors_, 2.0 * z / 3.0);
  const auto xn = factors_.xs->node_coordinates();
  u_.resize(xn.size());
  for (std::size_t i = 0; i < xn.size(); ++i) u_[i] = u0(xn[i]);
  for (double v : u_)
    if (!std::isfinite(v)) throw BlowupError(0, 0.0, "initial datum is not finite");
  const int p = factors_.xs->degree();
  grid_elem_.resize(cfg.grid.size());
  grid_basis_.resize(cfg.grid.size() * (p + 1));
  for (std::size_t j = 0; j < cfg.grid.size(); ++j) {
    const auto [e, t] = factors_.xs->locate(cfg.grid.node(j));
    grid_elem_[j] = e;
    for (int i = 0; i <= p; ++i) grid_basis_[j * (p + 1) + i] = factors_.xs->basis().value(i, t);
  }
}

ExtensionStepper::~ExtensionStepper() = default;

void ExtensionStepper::advance() {
  const double dt = cfg_.dt;
  const std::size_t n = u_.size();
  r_.resize(n);
  std::vector<double> nk(n);
  for (std::size_t i = 0; i < n; ++i) nk[i] = reaction(u_[i]);
  const ExtensionOperator* op;
  if (step_ == 0) {
    for (std::size_t i = 0; i < n; ++i) r_[i] = u_[i] + dt * nk[i];
    op = op_be_.get();
  } else {
    for (std::size_t i = 0; i < n; ++i)
      r_[i] = 4.0 / 3.0 * u_[i] - 1.0 / 3.0 * u_prev_[i] + 2.0 / 3.0 * dt * (2.0 * nk[i] - n_prev_[i]);
    op = op_bdf_.get();
  }
  op->solve_trace(r_, trace_);
  u_prev_.swap(u_);
  u_.swap(trace_);
  n_prev_.swap(nk);
  ++step_;
  time_ = static_cast<double>(step_) * dt;
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(u_[i]) || std::abs(u_[i]) > kBlowupBound)
      throw BlowupError(step_, time_, "extension trace left the admissible range at step " + std::to_string(step_));
    r = std::max(r, std::abs(u_[i] - u_prev_[i]));
  }
  rate_ = r / dt;
}

FieldState ExtensionStepper::snapshot() const {
  const int p = factors_.xs->degree();
  FieldState s;
  s.time = time_;
  s.step_index = step_;
  s.values.resize(cfg_.grid.size());
  for (std::size_t j = 0; j < s.values.size(); ++j) {
    const std::size_t base = grid_elem_[j] * p;
    double v = 0.0;
    for (int i = 0; i <= p; ++i) v += u_[base + i] * grid_basis_[j * (p + 1) + i];
    s.values[j] = v;
  }
  return s;
}

double ExtensionStepper::distance_to_one() const {
  Eigen::VectorXd d(u_.size());
  for (std::size_t i = 0; i < u_.size(); ++i) d(i) = u_[i] - 1.0;
  return std::sqrt(std::max(0.0, d.dot(factors_.x.mass * d)));
}

double ExtensionStepper::value_at(double x) const { return factors_.xs->evaluate(u_, x); }

ExtensionState ExtensionStepper::lift() const {
  ExtensionState s;
  s.time = time_;
  const auto ny = factors_.ys->dofs();
  if (step_ == 0) {
    // before the first solve there is no discrete extension yet: constant in y
    s.dofs.resize(u_.size() * ny);
    for (std::size_t ix = 0; ix < u_.size(); ++ix)
      for (std::size_t iy = 0; iy < ny; ++iy) s.dofs[ix * ny + iy] = u_[ix];
    return s;
  }
  s.dofs = (step_ == 1 ? op_be_ : op_bdf_)->solve_full(r_);
  return s;
}

std::vector<double> trace(const ExtensionFactors& f, const ExtensionState& state, const Grid1D& grid) {
  const auto nx = f.xs->dofs(), ny = f.ys->dofs();
  require(state.dofs.size() == nx * ny, ErrorKind::shape, "extension state does not match the mesh");
  std::vector<double> tr(nx);
  for (std::size_t ix = 0; ix < nx; ++ix) tr[ix] = state.dofs[ix * ny];
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) out[j] = f.xs->evaluate(tr, grid.node(j));
  return out;
}

ExtensionState step_sbdf2_ext(const ExtensionState& state_k, const ExtensionState& state_km1, double dt, double eps,
                              const ExtensionFactors& f) {
  const auto nx = f.xs->dofs(), ny = f.ys->dofs();
  require(state_k.dofs.size() == nx * ny && state_km1.dofs.size() == nx * ny, ErrorKind::shape,
          "extension state does not match the mesh");
  require(std::abs(state_k.time - state_km1.time - dt) <= 1e-9 * std::max(1.0, std::abs(state_k.time)),
          ErrorKind::config, "SBDF2 states must be exactly dt apart");
  std::vector<double> r(nx);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const double uk = state_k.dofs[ix * ny], um = state_km1.dofs[ix * ny];
    r[ix] = 4.0 / 3.0 * uk - 1.0 / 3.0 * um + 2.0 / 3.0 * dt * (2.0 * reaction(uk) - reaction(um));
  }
  const double c = 2.0 * dt * std::pow(eps, f.alpha) / (3.0 * d_alpha(f.alpha));
  ExtensionOperator op(f, c);
  return {op.solve_full(r), state_k.time + dt};
}

double discrete_dtn(const ExtensionFactors& f, double lam) {
  const MatLD A = to_dense_ld(f.y.stiffness) + static_cast<long double>(lam) * to_dense_ld(f.y.mass);
  const auto n = A.rows();
  const MatLD AII = A.bottomRightCorner(n - 1, n - 1);
  const Eigen::Matrix<long double, Eigen::Dynamic, 1> AI0 = A.col(0).tail(n - 1);
  const Eigen::Matrix<long double, Eigen::Dynamic, 1> z = AII.ldlt().solve(AI0);
  const long double e = A(0, 0) - AI0.dot(z);
  return static_cast<double>(e) / d_alpha(f.alpha);
}

}  // namespace fracac
