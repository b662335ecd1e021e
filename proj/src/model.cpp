#include "fj/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "fj/bessel.hpp"
#include "fj/errors.hpp"
#include "fj/trajectory.hpp"
#include "half_turns.hpp"

namespace fj {

using detail::cos_pi;
using detail::sin_pi;

namespace {

constexpr double kResonanceTolerance = 1e-9;
constexpr double kClosedFormGuard = 1e-12;
constexpr double kMaxConditionNumber = 1e12;

// i/2 (g + z) without the signed-zero noise of a full complex product.
Complex half_i_times(double g, Complex z) {
  return {-0.5 * z.imag(), 0.5 * (g + z.real())};
}

Amplitudes normalized(Amplitudes v) {
  std::size_t big = 0;
  for (std::size_t k = 1; k < 4; ++k) {
    if (std::abs(v[k]) > std::abs(v[big])) big = k;
  }
  const Complex pivot = v[big];
  if (pivot == Complex{}) return v;
  for (auto& x : v) x /= pivot;
  v[big] = 1.0;
  return v;
}

double residual(const Matrix4& m, Complex e, const Amplitudes& v) {
  Eigen::Matrix<Complex, 4, 1> x;
  for (int k = 0; k < 4; ++k) x(k) = v[static_cast<std::size_t>(k)];
  return (m * x - e * x).norm() / std::max(x.norm(), 1e-300);
}

// Closed-form eigenvectors, A = 1. Valid only for j+ != j-, j0 != 0 and
// j0^2 + j+ j- != 0.
std::array<Amplitudes, 4> closed_form_vectors(const EffectiveCouplings& c,
                                              double beta_l, double beta_r,
                                              Complex zeta_p, Complex zeta_m) {
  const double dj = c.j_plus - c.j_minus;
  const double ad = std::fabs(c.j0 * dj);
  const double den = c.j0 * c.j0 + c.j_plus * c.j_minus;
  const double alpha_p = (dj * dj + 2.0 * ad) / (4.0 * dj * den);
  const double alpha_m = (dj * dj - 2.0 * ad) / (4.0 * dj * den);
  const double kappa_p =
      (c.j0 * c.j0 * dj + c.j_plus * ad) / (2.0 * c.j0 * dj * den);
  const double kappa_m =
      (c.j0 * c.j0 * dj - c.j_plus * ad) / (2.0 * c.j0 * dj * den);
  const double eta = ad / (c.j0 * dj);
  const double s = beta_r + beta_l;
  const Complex i{0.0, 1.0};

  std::array<Amplitudes, 4> v;
  v[0] = {1.0, i * alpha_p * (s + zeta_p), -i * kappa_p * (s + zeta_p), -eta};
  v[1] = {1.0, -i * alpha_p * (-s + zeta_p), i * kappa_p * (-s + zeta_p), -eta};
  v[2] = {1.0, -i * alpha_m * (-s + zeta_m), i * kappa_m * (-s + zeta_m), eta};
  v[3] = {1.0, i * alpha_m * (s + zeta_m), -i * kappa_m * (s + zeta_m), eta};
  return v;
}

// Null-space eigenvectors: eigenvalues closer than the grouping threshold
// share one SVD and take trailing right singular vectors.
std::array<Amplitudes, 4> numerical_vectors(const Matrix4& m,
                                            const Spectrum& e) {
  const double scale = std::max(1.0, m.norm());
  const double group_tol = 1e-10 * scale;

  std::array<Amplitudes, 4> out{};
  std::array<bool, 4> done{};
  for (std::size_t p = 0; p < 4; ++p) {
    if (done[p]) continue;
    std::array<std::size_t, 4> members{};
    std::size_t count = 0;
    Complex centre{};
    for (std::size_t q = p; q < 4; ++q) {
      if (!done[q] && std::abs(e[q] - e[p]) <= group_tol) {
        members[count++] = q;
        centre += e[q];
      }
    }
    centre /= static_cast<double>(count);

    const Matrix4 shifted = m - centre * Matrix4::Identity();
    Eigen::JacobiSVD<Matrix4> svd(shifted, Eigen::ComputeFullV);
    const Matrix4& basis = svd.matrixV();
    // A defective eigenvalue has fewer null vectors than members; the extra
    // members repeat one so the mode matrix is visibly singular.
    std::size_t nullity = 1;
    while (nullity < count && svd.singularValues()(3 - static_cast<int>(nullity)) <= 1e-8 * scale) {
      ++nullity;
    }
    for (std::size_t j = 0; j < count; ++j) {
      const int col = 3 - static_cast<int>(std::min(j, nullity - 1));
      Amplitudes v;
      for (int k = 0; k < 4; ++k) v[static_cast<std::size_t>(k)] = basis(k, col);
      out[members[j]] = v;
      done[members[j]] = true;
    }
  }
  return out;
}

}  // namespace

void SystemParams::validate() const {
  const double fields[] = {nu, lambda, zeeman, omega, epsilon, beta_l, beta_r};
  for (double f : fields) {
    if (!std::isfinite(f)) throw ConfigError("parameters must be finite");
  }
  if (omega <= 0.0) throw ConfigError("omega must be positive");
  if (nu < 0.0) throw ConfigError("nu must be non-negative");
  if (beta_l < 0.0 || beta_r < 0.0) {
    throw ConfigError("gain and loss coefficients must be non-negative");
  }
}

double SystemParams::period() const {
  return 2.0 * std::numbers::pi / omega;
}

int SystemParams::resonance_order() const {
  if (!(omega > 0.0)) throw ConfigError("omega must be positive");
  const double ratio = zeeman / omega;
  const double n = std::round(ratio);
  if (!std::isfinite(ratio) || std::fabs(ratio - n) > kResonanceTolerance) {
    throw ResonanceError("Omega/omega = " + std::to_string(ratio) +
                         " is not an integer; the effective model requires "
                         "multiphoton resonance");
  }
  return static_cast<int>(n);
}

double StateVector::total_probability() const {
  double sum = 0.0;
  for (const auto& x : a) sum += std::norm(x);
  return sum;
}

StateVector StateVector::basis(int k, double t) {
  if (k < 1 || k > 4) throw ConfigError("basis index must be in 1..4");
  StateVector s;
  s.a[static_cast<std::size_t>(k - 1)] = 1.0;
  s.t = t;
  return s;
}

Amplitudes FloquetSolutionSet::slow_amplitudes(double t) const {
  Amplitudes d{};
  for (std::size_t p = 0; p < 4; ++p) {
    const Complex e = modes[p].e;
    const Complex w = lambdas[p] * std::exp(Complex{e.imag() * t, -e.real() * t});
    for (std::size_t k = 0; k < 4; ++k) d[k] += w * modes[p].vec[k];
  }
  return d;
}

EffectiveCouplings effective_couplings(const SystemParams& p) {
  p.validate();
  EffectiveCouplings c;
  c.n = p.resonance_order();
  const BesselOrder order(c.n);
  const double x = p.two_eps_over_omega();
  const double flip = p.nu * sin_pi(p.lambda);
  c.j0 = p.nu * cos_pi(p.lambda) * bessel_j(0, x);
  c.j_plus = flip * bessel_j(order, x);
  c.j_minus = flip * bessel_j(BesselOrder(-c.n), x);
  return c;
}

Matrix4 effective_matrix(const EffectiveCouplings& c, double beta_l,
                         double beta_r) {
  Matrix4 m = Matrix4::Zero();
  const Complex i{0.0, 1.0};
  m(0, 0) = -i * beta_r;
  m(0, 1) = -c.j_plus;
  m(0, 2) = -c.j0;
  m(1, 0) = -c.j_plus;
  m(1, 1) = i * beta_l;
  m(1, 3) = -c.j0;
  m(2, 0) = -c.j0;
  m(2, 2) = i * beta_l;
  m(2, 3) = c.j_minus;
  m(3, 1) = -c.j0;
  m(3, 2) = c.j_minus;
  m(3, 3) = -i * beta_r;
  return m;
}

Spectrum closed_form_spectrum(const EffectiveCouplings& c, double beta_l,
                              double beta_r) {
  const double cross = std::fabs(c.j0 * (c.j_plus - c.j_minus));
  const double s = beta_r + beta_l;
  const double base = s * s - 4.0 * c.j0 * c.j0 - 4.0 * c.j_plus * c.j_plus;
  const Complex zeta_p = std::sqrt(Complex{base + 4.0 * cross, 0.0});
  const Complex zeta_m = std::sqrt(Complex{base - 4.0 * cross, 0.0});
  const double g = beta_l - beta_r;
  return {half_i_times(g, zeta_p), half_i_times(g, -zeta_p),
          half_i_times(g, -zeta_m), half_i_times(g, zeta_m)};
}

ModeSet quasienergies(const EffectiveCouplings& c, double beta_l,
                      double beta_r) {
  const Spectrum e = closed_form_spectrum(c, beta_l, beta_r);
  const Matrix4 m = effective_matrix(c, beta_l, beta_r);
  const double tol = 1e-9 * std::max(1.0, m.norm());

  const double dj = c.j_plus - c.j_minus;
  const bool closed_form_defined =
      !c.even() && std::fabs(dj) > kClosedFormGuard &&
      std::fabs(c.j0) > kClosedFormGuard &&
      std::fabs(c.j0 * c.j0 + c.j_plus * c.j_minus) > kClosedFormGuard;

  std::array<Amplitudes, 4> vectors{};
  bool ok = false;
  if (closed_form_defined) {
    const double s = beta_r + beta_l;
    const double base = s * s - 4.0 * c.j0 * c.j0 - 4.0 * c.j_plus * c.j_plus;
    const double cross = std::fabs(c.j0 * dj);
    vectors = closed_form_vectors(c, beta_l, beta_r,
                                  std::sqrt(Complex{base + 4.0 * cross, 0.0}),
                                  std::sqrt(Complex{base - 4.0 * cross, 0.0}));
    ok = true;
    for (std::size_t p = 0; p < 4; ++p) {
      vectors[p] = normalized(vectors[p]);
      const bool finite = std::all_of(
          vectors[p].begin(), vectors[p].end(),
          [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
      if (!finite || residual(m, e[p], vectors[p]) > tol) ok = false;
    }
  }
  if (!ok) {
    vectors = numerical_vectors(m, e);
    for (auto& v : vectors) v = normalized(v);
  }

  ModeSet modes;
  for (std::size_t p = 0; p < 4; ++p) {
    modes[p] = {e[p], vectors[p], static_cast<int>(p) + 1};
  }
  std::stable_sort(modes.begin(), modes.end(),
                   [](const QuasienergyMode& a, const QuasienergyMode& b) {
                     if (a.e.imag() != b.e.imag()) return a.e.imag() > b.e.imag();
                     return a.e.real() < b.e.real();
                   });
  return modes;
}

Amplitudes frame_phases(const SystemParams& p, double t) {
  const double drive = p.epsilon / p.omega * std::sin(p.omega * t);
  const double zeeman = 0.5 * p.zeeman * t;
  return {std::polar(1.0, -(zeeman - drive)), std::polar(1.0, -(-zeeman + drive)),
          std::polar(1.0, -(zeeman + drive)), std::polar(1.0, -(-zeeman - drive))};
}

StateVector floquet_state_amplitudes(const QuasienergyMode& mode,
                                     const SystemParams& p, double t) {
  const Amplitudes phase = frame_phases(p, t);
  StateVector s;
  s.t = t;
  for (std::size_t k = 0; k < 4; ++k) s.a[k] = mode.vec[k] * phase[k];
  return s;
}

FloquetSolutionSet non_floquet_solution(const ModeSet& modes,
                                        const StateVector& initial) {
  Matrix4 v;
  for (int p = 0; p < 4; ++p) {
    const Complex decay = std::exp(Complex{modes[static_cast<std::size_t>(p)].e.imag() * initial.t,
                                           -modes[static_cast<std::size_t>(p)].e.real() * initial.t});
    for (int k = 0; k < 4; ++k) {
      v(k, p) = modes[static_cast<std::size_t>(p)].vec[static_cast<std::size_t>(k)] * decay;
    }
  }

  Eigen::JacobiSVD<Matrix4> svd(v);
  const auto& sv = svd.singularValues();
  const double cond = sv(3) > 0.0 ? sv(0) / sv(3) : INFINITY;
  if (!(cond < kMaxConditionNumber)) {
    throw DegeneracyError(
        "Floquet eigenvectors are (nearly) linearly dependent, condition "
        "number " + std::to_string(cond) +
        "; the parameters sit at or near an exceptional point, use the "
        "numerical integrator instead");
  }

  // initial.a is taken as d(t0), already in the effective frame.
  Eigen::Matrix<Complex, 4, 1> d0;
  for (int k = 0; k < 4; ++k) d0(k) = initial.a[static_cast<std::size_t>(k)];

  const Eigen::Matrix<Complex, 4, 1> lam = v.fullPivLu().solve(d0);
  FloquetSolutionSet out;
  out.modes = modes;
  for (int p = 0; p < 4; ++p) out.lambdas[static_cast<std::size_t>(p)] = lam(p);
  return out;
}

Trajectory analytic_evolution(const SystemParams& p, const StateVector& initial,
                              std::span<const double> times) {
  const EffectiveCouplings c = effective_couplings(p);
  const ModeSet modes = quasienergies(c, p.beta_l, p.beta_r);

  // Move the initial amplitudes into the effective frame at t0.
  StateVector start = initial;
  const Amplitudes phase0 = frame_phases(p, initial.t);
  for (std::size_t k = 0; k < 4; ++k) start.a[k] /= phase0[k];
  const FloquetSolutionSet sol = non_floquet_solution(modes, start);

  Trajectory traj;
  traj.reserve(times.size());
  for (double t : times) {
    const Amplitudes d = sol.slow_amplitudes(t);
    const Amplitudes phase = frame_phases(p, t);
    StateVector s;
    s.t = t;
    for (std::size_t k = 0; k < 4; ++k) s.a[k] = d[k] * phase[k];
    traj.append(s);
  }
  return traj;
}

}  // namespace fj
