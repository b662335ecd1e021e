#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fj/bessel.hpp"
#include "fj/checkpoints.hpp"
#include "fj/comparison.hpp"
#include "fj/errors.hpp"
#include "fj/integrator.hpp"
#include "fj/model.hpp"
#include "fj/stability.hpp"

using fj::Complex;

namespace {

fj::Spectrum dense_eigenvalues(const fj::Matrix4& m) {
  Eigen::ComplexEigenSolver<fj::Matrix4> solver(m, false);
  fj::Spectrum e;
  for (int k = 0; k < 4; ++k) e[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
  return e;
}

fj::Spectrum energies(const fj::ModeSet& modes) {
  fj::Spectrum e;
  for (std::size_t k = 0; k < 4; ++k) e[k] = modes[k].e;
  return e;
}

double residual(const fj::Matrix4& m, const fj::QuasienergyMode& mode) {
  Eigen::Matrix<Complex, 4, 1> v;
  for (int k = 0; k < 4; ++k) v(k) = mode.vec[static_cast<std::size_t>(k)];
  return ((m - mode.e * fj::Matrix4::Identity()) * v).norm();
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("parameter validation") {
  fj::SystemParams p;
  p.omega = 0.0;
  CHECK_THROWS_AS(p.validate(), fj::ConfigError);
  p = {};
  p.beta_l = -0.1;
  CHECK_THROWS_AS(p.validate(), fj::ConfigError);
  p = {};
  p.nu = -1.0;
  CHECK_THROWS_AS(p.validate(), fj::ConfigError);
}

TEST_CASE("resonance order") {
  fj::SystemParams p;
  p.omega = 50.0;
  p.zeeman = 100.0;
  CHECK(p.resonance_order() == 2);
  p.zeeman = 100.0 + 1e-8;
  CHECK(p.resonance_order() == 2);
  p.zeeman = 101.0;
  CHECK_THROWS_AS(p.resonance_order(), fj::ResonanceError);
  CHECK_THROWS_AS(fj::effective_couplings(p), fj::ResonanceError);
}

TEST_CASE("effective couplings") {
  SUBCASE("lambda = 1/2 removes the spin-conserving channel") {
    const auto c = fj::effective_couplings(fj::figures::balanced(2, 0.0, 1.7, 0.5));
    CHECK(c.j0 == 0.0);
    CHECK(c.n == 2);
  }
  SUBCASE("lambda = 1 at the first zero of J0 freezes tunnelling") {
    const auto c = fj::effective_couplings(fj::figures::balanced(1, 0.0, 2.4048, 1.0));
    CHECK(std::fabs(c.j0) < 1e-4);
    CHECK(c.j_plus == 0.0);
    CHECK(c.j_minus == 0.0);
  }
  SUBCASE("lambda = 1/3, eps = 75") {
    const auto c = fj::effective_couplings(fj::figures::fig7(0.0, 0.0));
    CHECK(c.j0 == doctest::Approx(0.5 * std::cyl_bessel_j(0.0, 3.0)).epsilon(1e-12));
    CHECK(c.j_plus == doctest::Approx(std::sqrt(3.0) / 2.0 * std::cyl_bessel_j(2.0, 3.0)).epsilon(1e-12));
    CHECK(std::fabs(c.j0 * c.j0 + c.j_plus * c.j_plus - 0.1941) < 1e-4);
    // the quoted beta_r = 0.9706 at beta_l = 0.2
    CHECK(std::fabs(0.2 * 0.9706 - (c.j0 * c.j0 + c.j_plus * c.j_plus)) < 1e-4);
  }
  SUBCASE("parity of j_minus") {
    for (int n : {1, 2, 3, 4}) {
      const auto c = fj::effective_couplings(fj::figures::balanced(n, 0.0, 2.2, 0.3));
      CHECK(c.j_minus == (n % 2 == 0 ? c.j_plus : -c.j_plus));
    }
  }
}

TEST_CASE("effective matrix") {
  SUBCASE("all zero") {
    const fj::EffectiveCouplings c{0.0, 0.0, 0.0, 2};
    CHECK(fj::effective_matrix(c, 0.0, 0.0).isZero());
  }
  SUBCASE("Hermitian without gain and loss") {
    const auto c = fj::effective_couplings(fj::figures::balanced(1, 0.0, 2.0, 0.3));
    const auto m = fj::effective_matrix(c, 0.0, 0.0);
    CHECK((m - m.adjoint()).norm() < 1e-15);
  }
  SUBCASE("entries") {
    const fj::EffectiveCouplings c{0.3, 0.2, -0.2, 1};
    const auto m = fj::effective_matrix(c, 0.1, 0.4);
    CHECK(m(0, 2) == Complex(-0.3));
    CHECK(m(0, 1) == Complex(-0.2));
    CHECK(m(0, 0) == Complex(0.0, -0.4));
    CHECK(m(1, 3) == Complex(-0.3));
    CHECK(m(1, 0) == Complex(-0.2));
    CHECK(m(1, 1) == Complex(0.0, 0.1));
    CHECK(m(2, 0) == Complex(-0.3));
    CHECK(m(2, 3) == Complex(-0.2));
    CHECK(m(2, 2) == Complex(0.0, 0.1));
    CHECK(m(3, 1) == Complex(-0.3));
    CHECK(m(3, 2) == Complex(-0.2));
    CHECK(m(3, 3) == Complex(0.0, -0.4));
    CHECK(m(0, 3) == Complex(0.0));
    CHECK(m(1, 2) == Complex(0.0));
  }
}

TEST_CASE("closed-form spectrum against a dense solver") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> order(1, 3);
  std::uniform_real_distribution<double> lam(0.0, 2.0), drive(0.0, 8.0), beta(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const int n = order(rng);
    const double x = drive(rng);
    const double l = lam(rng);
    const double bl = beta(rng);
    const double br = beta(rng);
    const auto c = fj::effective_couplings(fj::figures::balanced(n, 0.0, x, l));
    const auto m = fj::effective_matrix(c, bl, br);
    const auto closed = fj::closed_form_spectrum(c, bl, br);
    CHECK(fj::spectrum_distance(closed, dense_eigenvalues(m), 0.0) < 1e-9);

    // trace identity
    Complex sum = 0.0;
    for (auto e : closed) sum += e;
    CHECK(std::abs(sum - Complex(0.0, 2.0 * (bl - br))) < 1e-12);
  }
}

TEST_CASE("eigenvectors satisfy the eigen equation") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> order(1, 4);
  std::uniform_real_distribution<double> lam(0.0, 2.0), drive(0.0, 8.0), beta(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const int n = order(rng);
    const double x = drive(rng);
    const double l = lam(rng);
    const double bl = beta(rng);
    const double br = beta(rng);
    const auto c = fj::effective_couplings(fj::figures::balanced(n, 0.0, x, l));
    const auto m = fj::effective_matrix(c, bl, br);
    const auto modes = fj::quasienergies(c, bl, br);
    for (const auto& mode : modes) {
      CHECK(residual(m, mode) < 1e-9 * std::max(1.0, m.norm()));
      double biggest = 0.0;
      for (auto z : mode.vec) biggest = std::max(biggest, std::abs(z));
      CHECK(biggest == doctest::Approx(1.0).epsilon(1e-12));
    }
    // deterministic ordering: Im descending, then Re ascending
    for (std::size_t q = 1; q < 4; ++q) {
      const auto a = modes[q - 1].e;
      const auto b = modes[q].e;
      CHECK((a.imag() > b.imag() || (a.imag() == b.imag() && a.real() <= b.real())));
    }
  }
}

TEST_CASE("eigenvectors at special points fall back cleanly") {
  // j0 = 0 (lambda = 1/2) and even n (j+ = j-) have vanishing closed-form denominators
  for (const auto& p : {fj::figures::balanced(1, 0.3, 2.0, 0.5), fj::figures::balanced(2, 0.3, 2.0, 0.3),
                        fj::figures::balanced(2, 0.0, 0.0, 0.0)}) {
    const auto c = fj::effective_couplings(p);
    const auto m = fj::effective_matrix(c, p.beta_l, p.beta_r);
    for (const auto& mode : fj::quasienergies(c, p.beta_l, p.beta_r)) {
      CHECK(residual(m, mode) < 1e-9);
    }
  }
}

TEST_CASE("balanced even reduction") {
  const double beta = 0.3;
  const auto c = fj::effective_couplings(fj::figures::balanced(2, beta, 2.7, 0.37));
  const auto e = fj::closed_form_spectrum(c, beta, beta);
  const Complex rho = fj::rho_even(c, beta);
  const fj::Spectrum expected = {0.5 * Complex(0, 1) * rho, -0.5 * Complex(0, 1) * rho,
                                 -0.5 * Complex(0, 1) * rho, 0.5 * Complex(0, 1) * rho};
  CHECK(fj::spectrum_distance(e, expected, 0.0) < 1e-12);
  for (std::size_t k = 1; k < 4; ++k) {
    CHECK(std::fabs(std::fabs(e[k].real()) - std::fabs(e[0].real())) < 1e-12);
    CHECK(std::fabs(std::fabs(e[k].imag()) - std::fabs(e[0].imag())) < 1e-12);
  }
  fj::Spectrum negated;
  for (std::size_t k = 0; k < 4; ++k) negated[k] = -e[k];
  CHECK(fj::spectrum_distance(e, negated, 0.0) < 1e-12);
}

TEST_CASE("exceptional point on the even boundary") {
  const auto c = fj::effective_couplings(fj::figures::balanced(2, 0.0, 1.5, 0.3));
  const double b = fj::boundary_beta(c);
  for (auto e : fj::closed_form_spectrum(c, b, b)) CHECK(std::abs(e) < 1e-7);
}

TEST_CASE("balanced odd reduction") {
  const double beta = 0.25;
  const auto c = fj::effective_couplings(fj::figures::balanced(1, beta, 3.1, 0.21));
  const auto rho = fj::rho_odd(c, beta);
  const Complex i{0.0, 1.0};
  const fj::Spectrum expected = {0.5 * i * rho.minus, -0.5 * i * rho.minus,
                                 -0.5 * i * rho.plus, 0.5 * i * rho.plus};
  const auto m = fj::effective_matrix(c, beta, beta);
  CHECK(fj::spectrum_distance(expected, dense_eigenvalues(m), 0.0) < 1e-9);
  CHECK(fj::spectrum_distance(expected, fj::closed_form_spectrum(c, beta, beta), 0.0) < 1e-12);
}

TEST_CASE("Floquet state envelope") {
  const auto p = fj::figures::balanced(2, 0.2, 3.0, 0.5);
  const auto modes = fj::quasienergies(fj::effective_couplings(p), p.beta_l, p.beta_r);
  const auto& mode = modes[0];
  const auto s0 = fj::floquet_state_amplitudes(mode, p, 0.0);
  for (std::size_t k = 0; k < 4; ++k) CHECK(s0.a[k] == mode.vec[k]);
  for (double t : {0.013, p.period(), 7.77}) {
    const auto s = fj::floquet_state_amplitudes(mode, p, t);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(s.a[k]) == doctest::Approx(std::abs(mode.vec[k])));
  }
  // one period advances each phase by n pi
  const auto st = fj::floquet_state_amplitudes(mode, p, p.period());
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(st.a[k] - mode.vec[k]) < 1e-12);
}

TEST_CASE("non-Floquet superposition") {
  const auto p = fj::figures::balanced(1, 0.1, 3.0, 0.3);
  const auto modes = fj::quasienergies(fj::effective_couplings(p), p.beta_l, p.beta_r);

  SUBCASE("eigenvector start selects one mode") {
    fj::StateVector s;
    s.a = modes[2].vec;
    const auto sol = fj::non_floquet_solution(modes, s);
    for (std::size_t q = 0; q < 4; ++q) CHECK(std::abs(sol.lambdas[q] - (q == 2 ? 1.0 : 0.0)) < 1e-10);
  }
  SUBCASE("reconstruction") {
    const auto h = fj::figures::balanced(2, 0.0, 1.0, 0.3);
    const auto hm = fj::quasienergies(fj::effective_couplings(h), 0.0, 0.0);
    const auto sol = fj::non_floquet_solution(hm, fj::StateVector::basis(1));
    const auto d = sol.slow_amplitudes(0.0);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(d[k] - (k == 0 ? 1.0 : 0.0)) < 1e-10);
  }
  SUBCASE("exceptional point is rejected") {
    const auto c = fj::effective_couplings(fj::figures::balanced(2, 0.0, 1.5, 0.3));
    const double b = fj::boundary_beta(c);
    const auto ep = fj::quasienergies(c, b, b);
    CHECK_THROWS_AS(fj::non_floquet_solution(ep, fj::StateVector::basis(1)), fj::DegeneracyError);
  }
}

TEST_CASE("analytic evolution") {
  SUBCASE("starts at the initial state") {
    const auto p = fj::figures::balanced(2, 0.2, 3.0, 0.5);
    const std::vector<double> t = {0.0, 0.5};
    const auto traj = fj::analytic_evolution(p, fj::StateVector::basis(1), t);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(traj.states()[0].a[k] - (k == 0 ? 1.0 : 0.0)) < 1e-12);
  }
  SUBCASE("CDT freezes the populations") {
    const auto p = fj::figures::balanced(2, 0.0, 2.404825557695773, 0.0);
    std::vector<double> t;
    for (int k = 0; k <= 200; ++k) t.push_back(0.1 * k);
    const auto traj = fj::analytic_evolution(p, fj::StateVector::basis(1), t);
    for (const auto& pr : traj.probabilities()) CHECK(pr.p[0] > 1.0 - 1e-10);
  }
  SUBCASE("spin-flipping channel dominates at Fig. 2(e) parameters") {
    const auto p = fj::figures::balanced(2, 0.1, 2.405, 0.4);
    std::vector<double> t;
    for (int k = 0; k <= 400; ++k) t.push_back(0.05 * k);
    const auto traj = fj::analytic_evolution(p, fj::StateVector::basis(1), t);
    double p12 = 0.0, p34 = 0.0, total = 0.0;
    for (const auto& pr : traj.probabilities()) {
      p12 = std::max(p12, pr.p[0] + pr.p[1]);
      p34 = std::max(p34, pr.p[2] + pr.p[3]);
      total = std::max(total, pr.total);
    }
    CHECK(total < 10.0);
    CHECK(p34 < 1e-3 * p12);
  }
  SUBCASE("agrees with exact integration in the high-frequency regime") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lam(0.0, 2.0), drive(0.0, 8.0), beta(0.0, 0.6);
    for (int k = 0; k < 12; ++k) {
      const int n = 1 + k % 2;
      const double x = drive(rng);
      const double l = lam(rng);
      const double b = beta(rng);
      const auto p = fj::figures::balanced(n, b, x, l);
      fj::IntegrationConfig cfg;
      cfg.t_end = 10.0 * p.period();
      cfg.sample_stride = 16;
      const auto exact = fj::propagate(p, fj::StateVector::basis(1), cfg);
      try {
        const auto ana = fj::analytic_evolution(p, fj::StateVector::basis(1), exact.times());
        CHECK(fj::compare_trajectories(exact, ana).max_abs_amplitude_dev <= 0.05);
      } catch (const fj::DegeneracyError&) {
        // exactly at an exceptional point there is no Floquet basis
      }
    }
  }
}

}
