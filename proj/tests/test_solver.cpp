#include <doctest.h>

#include <cmath>

#include "fracac/error.hpp"
#include "fracac/spectral_solver.hpp"
#include "gen.hpp"

using namespace fracac;
using testing::max_abs_diff;

namespace {

SolverConfig config(double L, std::size_t N, double eps, double alpha, double dt, Scheme s = Scheme::sbdf2) {
  SolverConfig c;
  c.eps = eps;
  c.alpha = alpha;
  c.dt = dt;
  c.scheme = s;
  c.grid = build_grid(L, N);
  return c;
}

std::vector<double> constant(std::size_t n, double v) { return std::vector<double>(n, v); }

// Dense cosine transform (independent of the FFT path).
std::vector<double> dense_coeffs(const Grid1D& g, const std::vector<double>& u) {
  const std::size_t N = g.size();
  const double L = g.half_length();
  std::vector<double> c(N, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    const double norm = n == 0 ? 1 / std::sqrt(2 * L) : 1 / std::sqrt(L);
    long double s = 0;
    for (std::size_t j = 0; j < N; ++j) s += u[j] * norm * std::cos(n * M_PI * (g.node(j) + L) / (2 * L));
    c[n] = static_cast<double>(s * g.spacing());
  }
  return c;
}

std::vector<double> reaction_of(const std::vector<double>& u) {
  std::vector<double> r(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) r[j] = reaction(u[j]);
  return r;
}

}  // namespace

TEST_CASE("constant states one and zero are fixed points") {
  for (Scheme s : {Scheme::imex_euler, Scheme::sbdf2}) {
    const SolverConfig cfg = config(10, 64, 0.1, 0.9, 0.05, s);
    for (double v : {1.0, 0.0, -1.0}) {
      SpectralStepper st(cfg, constant(64, v));
      for (int k = 0; k < 50; ++k) st.advance();
      CHECK(max_abs_diff(st.values(), constant(64, v)) < 1e-14);
    }
  }
  const SolverConfig cfg = config(10, 64, 0.1, 0.9, 0.05);
  CosineBasis b(cfg.grid);
  const FieldState one{constant(64, 1.0), 0.0, 0};
  const FieldState one1{constant(64, 1.0), 0.05, 1};
  CHECK(max_abs_diff(step_imex_euler(b, one, cfg).values, one.values) < 1e-14);
  CHECK(max_abs_diff(step_sbdf2(b, one1, one, cfg).values, one.values) < 1e-14);
}

TEST_CASE("homogeneous state follows the scalar IMEX recurrence") {
  const SolverConfig cfg = config(10, 32, 0.5, 1.3, 0.05, Scheme::imex_euler);
  CosineBasis b(cfg.grid);
  const FieldState s{constant(32, 0.01), 0.0, 0};
  const FieldState n = step_imex_euler(b, s, cfg);
  const double want = 0.01 * (1 + 0.05) - 0.05 * 1e-6;
  CHECK(max_abs_diff(n.values, constant(32, want)) < 1e-15);
  CHECK(n.time == doctest::Approx(0.05));
  CHECK(n.step_index == 1);
}

TEST_CASE("homogeneous states follow the scalar SBDF2 recurrence") {
  const double dt = 0.04;
  const SolverConfig cfg = config(3, 32, 0.2, 0.7, dt);
  CosineBasis b(cfg.grid);
  const double a = 0.3, p = 0.25;
  const FieldState km1{constant(32, p), 1.0, 5}, k{constant(32, a), 1.0 + dt, 6};
  const double want = 4.0 / 3 * a - 1.0 / 3 * p + 2.0 / 3 * dt * (2 * reaction(a) - reaction(p));
  CHECK(max_abs_diff(step_sbdf2(b, k, km1, cfg).values, constant(32, want)) < 1e-12);
}

TEST_CASE("SBDF2 step matches the per-mode recurrence on random data") {
  testing::Gen g(9);
  const SolverConfig cfg = config(4, 48, 0.3, 1.4, 0.03);
  CosineBasis b(cfg.grid);
  const auto u0 = g.vector(48, -0.9, 0.9), u1 = g.vector(48, -0.9, 0.9);
  const FieldState km1{u0, 0.0, 0}, k{u1, 0.03, 1};
  const auto out = step_sbdf2(b, k, km1, cfg);
  const auto c0 = dense_coeffs(cfg.grid, u0), c1 = dense_coeffs(cfg.grid, u1);
  const auto n0 = dense_coeffs(cfg.grid, reaction_of(u0)), n1 = dense_coeffs(cfg.grid, reaction_of(u1));
  const auto got = dense_coeffs(cfg.grid, out.values);
  for (std::size_t n = 0; n < 48; ++n) {
    const double z = cfg.dt * std::pow(cfg.eps, cfg.alpha) * std::pow(std::pow(n * M_PI / 8, 2), cfg.alpha / 2);
    const double want = (4.0 / 3 * c1[n] - 1.0 / 3 * c0[n] + 2.0 / 3 * cfg.dt * (2 * n1[n] - n0[n])) / (1 + 2.0 / 3 * z);
    CHECK(std::abs(got[n] - want) < 1e-12);
  }
}

TEST_CASE("small single mode: SBDF2 amplification matches the linear recurrence") {
  // amplitude 1e-9: the cubic term is below roundoff, the reaction acts as +u
  const double dt = 0.02, eps = 0.4, alpha = 1.1, L = 5;
  const int n = 3;
  const SolverConfig cfg = config(L, 64, eps, alpha, dt);
  CosineBasis b(cfg.grid);
  std::vector<double> u0(64), u1(64);
  const double z = dt * std::pow(eps, alpha) * std::pow(std::pow(n * M_PI / (2 * L), 2), alpha / 2);
  const double r0 = 1e-9, r1 = 1e-9 * (1 + dt) / (1 + z);  // Euler startup value
  for (int j = 0; j < 64; ++j) {
    const double m = std::cos(n * M_PI * (cfg.grid.node(j) + L) / (2 * L));
    u0[j] = r0 * m;
    u1[j] = r1 * m;
  }
  // scalar recurrence for the mode amplitude
  double pm = r0, pk = r1;
  FieldState km1{u0, 0, 0}, k{u1, dt, 1};
  for (int s = 0; s < 20; ++s) {
    const double next = (4.0 / 3 * pk - 1.0 / 3 * pm + 2.0 / 3 * dt * (2 * pk - pm)) / (1 + 2.0 / 3 * z);
    FieldState nk = step_sbdf2(b, k, km1, cfg);
    km1 = k;
    k = nk;
    pm = pk;
    pk = next;
  }
  const auto c = b.forward(k.values);
  CHECK(std::abs(c[n] / std::sqrt(L) - pk) / pk < 1e-12);
}

TEST_CASE("stepper reproduces the reference steps") {
  testing::Gen g(21);
  for (Scheme s : {Scheme::imex_euler, Scheme::sbdf2}) {
    const SolverConfig cfg = config(6, 128, 0.2, 0.8, 0.05, s);
    CosineBasis b(cfg.grid);
    const auto u0 = g.smooth_field(cfg.grid.nodes(), 6, 8, 0.9);
    SpectralStepper st(cfg, u0);
    FieldState prev{u0, 0, 0};
    FieldState cur = step_imex_euler(b, prev, cfg);
    st.advance();
    CHECK(max_abs_diff(st.values(), cur.values) < 1e-13);
    for (int k = 0; k < 30; ++k) {
      FieldState next = s == Scheme::sbdf2 ? step_sbdf2(b, cur, prev, cfg) : step_imex_euler(b, cur, cfg);
      prev = cur;
      cur = next;
      st.advance();
    }
    CHECK(max_abs_diff(st.values(), cur.values) < 1e-12);
    CHECK(st.time() == doctest::Approx(cur.time));
    CHECK(st.step_index() == cur.step_index);
  }
}

TEST_CASE("configuration and timestamp errors") {
  SolverConfig cfg = config(1, 16, 0.1, 1.0, kMaxDt * 1.01);
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg.dt = 0.01;
  cfg.alpha = 2.1;
  try {
    validate(cfg);
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
  cfg.alpha = 1.0;
  CosineBasis b(cfg.grid);
  const FieldState a{constant(16, 0.1), 0.0, 0}, c{constant(16, 0.1), 0.03, 1};
  try {
    step_sbdf2(b, c, a, cfg);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
  }
}

TEST_CASE("blow-up carries the step index") {
  const SolverConfig cfg = config(1, 16, 0.1, 1.0, 0.5, Scheme::imex_euler);
  SpectralStepper st(cfg, constant(16, 5.0));
  try {
    st.advance();
    FAIL("expected blow-up");
  } catch (const BlowupError& e) {
    CHECK(e.kind() == ErrorKind::blowup);
    CHECK(e.step() == 1);
  }
  std::vector<double> bad(16, 0.0);
  bad[3] = NAN;
  CHECK_THROWS_AS(SpectralStepper(cfg, bad), BlowupError);
}

TEST_CASE("run loop: fixed point, observers and stationarity failure") {
  const SolverConfig cfg = config(10, 64, 0.1, 0.9, 0.05);
  SpectralStepper st(cfg, constant(64, 1.0));
  int calls = 0;
  StrideObserver obs(10, [&](const FieldState&) { ++calls; });
  Observer* list[] = {&obs};
  const RunResult r = run(st, StopRule::until(5.0), list);
  CHECK(r.outcome == RunOutcome::reached_time);
  CHECK(r.final_state.time == doctest::Approx(5.0));
  CHECK(max_abs_diff(r.final_state.values, constant(64, 1.0)) == 0.0);
  CHECK(calls == 11);

  // a slow two-interface state is not stationary after one time unit
  std::vector<double> u(256);
  const SolverConfig c2 = config(10, 256, 0.3, 1.0, 0.05);
  for (int j = 0; j < 256; ++j) u[j] = std::tanh((std::abs(c2.grid.node(j)) - 3) / 0.5);
  SpectralStepper s2(c2, u);
  try {
    run(s2, StopRule::stationary(1.0, 1e-10));
    FAIL("expected convergence error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::convergence);
  }
}

TEST_CASE("even data stays even") {
  testing::Gen g(33);
  const SolverConfig cfg = config(5, 256, 0.1, 1.3, 0.05);
  const auto x = cfg.grid.nodes();
  std::vector<double> u(256);
  for (int j = 0; j < 256; ++j) u[j] = 0.9 * std::cos(1.3 * x[j]) * std::exp(-0.1 * x[j] * x[j]);
  SpectralStepper st(cfg, u);
  for (int k = 0; k < 200; ++k) {
    st.advance();
    const auto& v = st.values();
    double asym = 0;
    for (int j = 0; j < 128; ++j) asym = std::max(asym, std::abs(v[j] - v[255 - j]));
    REQUIRE(asym < 1e-10);
  }
}

TEST_CASE("IMEX-Euler and SBDF2 gap is first order in dt") {
  testing::Gen g(44);
  const double T = 2.0;
  std::vector<double> gaps;
  for (double dt : {0.04, 0.02, 0.01}) {
    SolverConfig a = config(5, 128, 0.3, 1.2, dt, Scheme::imex_euler), b = a;
    b.scheme = Scheme::sbdf2;
    testing::Gen gg(44);
    const auto u0 = gg.smooth_field(a.grid.nodes(), 5, 6, 0.8);
    SpectralStepper sa(a, u0), sb(b, u0);
    const int steps = static_cast<int>(std::lround(T / dt));
    for (int k = 0; k < steps; ++k) sa.advance(), sb.advance();
    gaps.push_back(max_abs_diff(sa.values(), sb.values()));
  }
  CHECK(gaps[0] / gaps[1] == doctest::Approx(2.0).epsilon(0.2));
  CHECK(gaps[1] / gaps[2] == doctest::Approx(2.0).epsilon(0.2));
}
