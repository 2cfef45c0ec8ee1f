#include "fracac/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "fracac/error.hpp"

namespace fracac {
namespace {

// FFTW's planner is not re-entrant; execution of an existing plan on new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void check_len(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    fail(ErrorKind::shape, std::string(what) + ": length " + std::to_string(got) +
                               " does not match grid size " + std::to_string(want));
}

// Per-thread SIMD-aligned work arrays (plans are created on aligned arrays, so
// new-array execution must use aligned memory as well).
struct Scratch {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  std::size_t cap = 0;
  ~Scratch() {
    fftw_free(real);
    fftw_free(cplx);
  }
  void reserve(std::size_t n) {
    if (n <= cap) return;
    fftw_free(real);
    fftw_free(cplx);
    real = fftw_alloc_real(n);
    cplx = fftw_alloc_complex(n / 2 + 1);
    cap = n;
  }
};

Scratch& scratch(std::size_t n) {
  thread_local Scratch s;
  s.reserve(n);
  return s;
}

}  // namespace

// Even N: DCT-II/III through one real FFT of the even-odd reordered sequence
// (Makhoul), which is markedly faster than FFTW's own r2r kinds. Odd N falls
// back to REDFT10/REDFT01. The sine transform is only used off the hot path.
struct CosineBasis::Plans {
  bool even = true;
  fftw_plan r2c = nullptr, c2r = nullptr;
  fftw_plan dct2 = nullptr, dct3 = nullptr;
  fftw_plan dst3 = nullptr;
  std::vector<double> tw_re, tw_im;  // exp(-i pi k / (2N))
};

CosineBasis::CosineBasis(const Grid1D& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
  const std::size_t n = grid.size();
  require(n >= 2, ErrorKind::config, "cosine basis needs at least 2 points");
  Plans& P = *plans_;
  P.even = n % 2 == 0;
  double* a = fftw_alloc_real(n);
  double* b = fftw_alloc_real(n);
  fftw_complex* c = fftw_alloc_complex(n / 2 + 1);
  {
    // ESTIMATE keeps plans (and therefore results) identical from run to run.
    std::lock_guard lock(planner_mutex());
    const int ni = static_cast<int>(n);
    if (P.even) {
      P.r2c = fftw_plan_dft_r2c_1d(ni, a, c, FFTW_ESTIMATE);
      P.c2r = fftw_plan_dft_c2r_1d(ni, c, a, FFTW_ESTIMATE);
    } else {
      P.dct2 = fftw_plan_r2r_1d(ni, a, b, FFTW_REDFT10, FFTW_ESTIMATE);
      P.dct3 = fftw_plan_r2r_1d(ni, a, b, FFTW_REDFT01, FFTW_ESTIMATE);
    }
    P.dst3 = fftw_plan_r2r_1d(ni, a, b, FFTW_RODFT01, FFTW_ESTIMATE);
  }
  fftw_free(a);
  fftw_free(b);
  fftw_free(c);
  if ((P.even && (!P.r2c || !P.c2r)) || (!P.even && (!P.dct2 || !P.dct3)) || !P.dst3)
    fail(ErrorKind::internal, "FFTW plan creation failed");
  P.tw_re.resize(n / 2 + 1);
  P.tw_im.resize(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double th = std::numbers::pi * static_cast<double>(k) / (2.0 * static_cast<double>(n));
    P.tw_re[k] = std::cos(th);
    P.tw_im[k] = -std::sin(th);
  }
}

CosineBasis::~CosineBasis() {
  std::lock_guard lock(planner_mutex());
  for (fftw_plan p : {plans_->r2c, plans_->c2r, plans_->dct2, plans_->dct3, plans_->dst3})
    if (p) fftw_destroy_plan(p);
}

double CosineBasis::eigenvalue(std::size_t n) const {
  const double k = static_cast<double>(n) * std::numbers::pi / (2.0 * grid_.half_length());
  return k * k;
}

std::vector<double> CosineBasis::symbol(double alpha) const {
  std::vector<double> s(size());
  for (std::size_t n = 0; n < size(); ++n) s[n] = std::pow(eigenvalue(n), alpha / 2.0);
  return s;
}

void CosineBasis::dct2_raw(const double* x, double* y) const {
  // Y_k = 2 sum_j x_j cos(pi k (j + 1/2) / N), FFTW's REDFT10 convention
  const Plans& P = *plans_;
  const std::size_t n = size();
  Scratch& w = scratch(n);
  if (!P.even) {
    std::copy(x, x + n, w.real);
    fftw_execute_r2r(P.dct2, w.real, y);
    return;
  }
  const std::size_t h = n / 2;
  for (std::size_t j = 0; j < h; ++j) {
    w.real[j] = x[2 * j];
    w.real[n - 1 - j] = x[2 * j + 1];
  }
  fftw_execute_dft_r2c(P.r2c, w.real, w.cplx);
  for (std::size_t k = 0; k <= h; ++k) {
    const double re = w.cplx[k][0], im = w.cplx[k][1];
    // Z_k = exp(-i pi k / 2N) V_k; Y_k = 2 Re Z_k, Y_{N-k} = -2 Im Z_k
    const double zr = P.tw_re[k] * re - P.tw_im[k] * im;
    const double zi = P.tw_re[k] * im + P.tw_im[k] * re;
    y[k] = 2.0 * zr;
    if (k > 0 && k < h) y[n - k] = -2.0 * zi;
  }
}

void CosineBasis::dct3_raw(const double* x, double* y) const {
  // y_j = x_0 + 2 sum_{k>=1} x_k cos(pi k (j + 1/2) / N), FFTW's REDFT01 convention
  const Plans& P = *plans_;
  const std::size_t n = size();
  Scratch& w = scratch(n);
  if (!P.even) {
    std::copy(x, x + n, w.real);
    fftw_execute_r2r(P.dct3, w.real, y);
    return;
  }
  const std::size_t h = n / 2;
  for (std::size_t k = 0; k <= h; ++k) {
    // V_k = conj(t_k) (X_k - i X_{N-k}) with X_N = 0; the factor 2N of the
    // REDFT01/REDFT10 pair is absorbed by the unnormalized c2r transform
    const double ar = x[k];
    const double ai = (k == 0) ? 0.0 : -x[n - k];
    const double tr = P.tw_re[k], ti = -P.tw_im[k];
    w.cplx[k][0] = tr * ar - ti * ai;
    w.cplx[k][1] = tr * ai + ti * ar;
  }
  w.cplx[0][1] = 0.0;
  w.cplx[h][1] = 0.0;
  fftw_execute_dft_c2r(P.c2r, w.cplx, w.real);
  for (std::size_t j = 0; j < h; ++j) {
    y[2 * j] = w.real[j];
    y[2 * j + 1] = w.real[n - 1 - j];
  }
}

void CosineBasis::forward(std::span<const double> values, std::span<double> coeffs) const {
  check_len(values.size(), size(), "forward");
  check_len(coeffs.size(), size(), "forward output");
  dct2_raw(values.data(), coeffs.data());
  const double L = grid_.half_length(), h = grid_.spacing();
  coeffs[0] *= h / (2.0 * std::sqrt(2.0 * L));
  const double s = h / (2.0 * std::sqrt(L));
  for (std::size_t n = 1; n < size(); ++n) coeffs[n] *= s;
}

void CosineBasis::inverse(std::span<const double> coeffs, std::span<double> values) const {
  check_len(coeffs.size(), size(), "inverse");
  check_len(values.size(), size(), "inverse output");
  thread_local std::vector<double> x;
  x.assign(coeffs.begin(), coeffs.end());
  const double L = grid_.half_length();
  x[0] /= std::sqrt(2.0 * L);
  const double s = 1.0 / (2.0 * std::sqrt(L));
  for (std::size_t n = 1; n < size(); ++n) x[n] *= s;
  dct3_raw(x.data(), values.data());
}

void CosineBasis::derivative(std::span<const double> coeffs, std::span<double> values) const {
  check_len(coeffs.size(), size(), "derivative");
  check_len(values.size(), size(), "derivative output");
  const std::size_t n = size();
  const double L = grid_.half_length();
  Scratch& w = scratch(n);
  // d/dx cos(k(x+L)) = -k sin(k(x+L)); RODFT01 input index m carries mode m+1.
  for (std::size_t m = 0; m + 1 < n; ++m) {
    const double k = static_cast<double>(m + 1) * std::numbers::pi / (2.0 * L);
    w.real[m] = -coeffs[m + 1] * k / (2.0 * std::sqrt(L));
  }
  w.real[n - 1] = 0.0;
  // output must be aligned too; go through a second aligned buffer
  double* tmp = fftw_alloc_real(n);
  fftw_execute_r2r(plans_->dst3, w.real, tmp);
  std::copy(tmp, tmp + n, values.begin());
  fftw_free(tmp);
}

std::vector<double> CosineBasis::forward(std::span<const double> values) const {
  std::vector<double> c(size());
  forward(values, c);
  return c;
}

std::vector<double> CosineBasis::inverse(std::span<const double> coeffs) const {
  std::vector<double> v(size());
  inverse(coeffs, v);
  return v;
}

SpectralField forward(const CosineBasis& basis, std::span<const double> values) {
  return SpectralField{basis.grid(), basis.forward(values)};
}

std::vector<double> inverse(const CosineBasis& basis, const SpectralField& field) {
  return basis.inverse(field.coeffs);
}

std::vector<double> apply_frac_laplacian(const CosineBasis& basis, std::span<const double> values,
                                         double alpha, double eps) {
  if (!(alpha > 0.0 && alpha <= 2.0)) fail(ErrorKind::domain, "alpha must lie in (0, 2]");
  if (!(eps > 0.0)) fail(ErrorKind::domain, "eps must be positive");
  auto c = basis.forward(values);
  const double scale = std::pow(eps, alpha);
  c[0] = 0.0;  // lambda_0 = 0: constants are annihilated exactly
  for (std::size_t n = 1; n < c.size(); ++n) c[n] *= scale * std::pow(basis.eigenvalue(n), alpha / 2.0);
  return basis.inverse(c);
}

}  // namespace fracac
