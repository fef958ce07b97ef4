#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "maxent/errors.hpp"
#include "maxent/gas_model.hpp"

namespace maxent::rel {

/// Relativistic gas description. Statistics sign convention: the
/// occupation denominator is exp(m alpha / kB + gamma cosh rho) + s with
/// s = +1 for Fermions, -1 for Bosons, 0 for the non-degenerate gas.
struct RelGas {
  double m = 1.0;
  double c = 1.0;
  double kB = 1.0;
  double Y = 1.0;
  Statistics statistics = Statistics::kNonDegenerate;

  int s() const noexcept { return static_cast<int>(statistics); }
  double beta() const noexcept { return m / kB; }
  void validate() const {
    if (!(m > 0.0) || !(c > 0.0) || !(kB > 0.0) || !(Y > 0.0))
      throw DegenerateState("RelGas: m, c, kB, Y must be positive");
  }
};

enum class RelRegime {
  kNonDegenerate,
  kStrongFermi,
  kCompleteFermi,
  kCompleteBose,
  kNumeric,
  kAuto,
};

inline const char* regime_name(RelRegime r) {
  switch (r) {
    case RelRegime::kNonDegenerate: return "non_degenerate";
    case RelRegime::kStrongFermi: return "strong_fermi";
    case RelRegime::kCompleteFermi: return "complete_fermi";
    case RelRegime::kCompleteBose: return "complete_bose";
    case RelRegime::kNumeric: return "numeric";
    default: return "auto";
  }
}

namespace detail {

/// Occupation value 1/(exp(x) + s), stable for large |x|.
inline double occupation(double x, int s) {
  if (x > 0.0) {
    const double t = std::exp(-x);
    return t / (1.0 + s * t);
  }
  return 1.0 / (std::exp(x) + s);
}

// Gauss-Kronrod 7-15 pair on [-1, 1].
struct GK15 {
  static constexpr double xk[8] = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.0};
  static constexpr double wk[8] = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

template <typename F>
void gk15(F&& f, double a, double b, double& kres, double& gres) {
  const double h = 0.5 * (b - a), mid = 0.5 * (a + b);
  double k = 0.0, g = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = h * GK15::xk[i];
    const double fv = (i == 7) ? f(mid) : f(mid - dx) + f(mid + dx);
    k += GK15::wk[i] * fv;
    if (i % 2 == 1) g += GK15::wg[i / 2] * fv;
  }
  kres = k * h;
  gres = g * h;
}

template <typename F>
double adaptive_gk(F&& f, double a, double b, double tol, int depth = 0) {
  double k, g;
  gk15(f, a, b, k, g);
  if (depth > 48 || std::abs(k - g) <= tol * (std::abs(k) + 1e-300)) return k;
  const double mid = 0.5 * (a + b);
  return adaptive_gk(f, a, mid, tol, depth + 1) + adaptive_gk(f, mid, b, tol, depth + 1);
}

/// Semi-infinite integral over [0, inf) on dyadic blocks; stops when two
/// consecutive blocks are negligible.
template <typename F>
double integrate_half_line(F&& f, double tol = 1e-13) {
  double total = 0.0, lo = 0.0, hi = 1.0;
  int quiet = 0;
  while (hi < 1e9) {
    const double part = adaptive_gk(f, lo, hi, tol);
    total += part;
    quiet = (std::abs(part) <= 1e-16 * (std::abs(total) + 1e-300)) ? quiet + 1 : 0;
    if (quiet >= 2) break;
    lo = hi;
    hi *= 2.0;
  }
  return total;
}

/// Scaled modified Bessel function K_nu(x) exp(x); quadrature of
/// cosh(nu t) exp(-x (cosh t - 1)) for large x avoids under/overflow.
inline double scaled_bessel_K(int nu, double x) {
  if (!(x > 0.0)) throw DomainError("scaled_bessel_K: argument must be positive");
  if (x < 30.0) return std::cyl_bessel_k(static_cast<double>(nu), x) * std::exp(x);
  return integrate_half_line([nu, x](double t) {
    const double sh = std::sinh(0.5 * t);
    return std::cosh(nu * t) * std::exp(-2.0 * x * sh * sh);
  });
}

}  // namespace detail

/// Modified Bessel function of the second kind, integer order.
inline double bessel_K(int nu, double x) {
  if (!(x > 0.0)) throw DomainError("bessel_K: argument must be positive");
  return std::cyl_bessel_k(static_cast<double>(nu), x);
}

struct INuResult {
  double value = 0.0;
  RelRegime regime = RelRegime::kNumeric;
};

namespace detail {

inline double i_nu_numeric(int nu, double alpha, double gamma, const RelGas& gas) {
  const double x0 = gas.beta() * alpha;
  const int s = gas.s();
  if (s < 0 && !(x0 + gamma > 0.0))
    throw DomainError("Bose integral diverges at or beyond the condensation line");
  // Substitution cosh(rho) = 1 + t^2: cosh(nu rho) = T_nu(1 + t^2)
  // (Chebyshev recurrence), d rho = 2 dt / sqrt(t^2 + 2).
  return integrate_half_line([=](double t) {
    const double u = 1.0 + t * t;
    double tm = 1.0, tc = u;
    for (int k = 1; k < nu; ++k) {
      const double tn = 2.0 * u * tc - tm;
      tm = tc;
      tc = tn;
    }
    const double cheb = (nu == 0) ? 1.0 : tc;
    return 2.0 / std::sqrt(t * t + 2.0) * cheb * occupation(x0 + gamma * u, s);
  });
}

inline double fermi_rho(double alpha, double gamma, const RelGas& gas) {
  const double ratio = gas.beta() * alpha / gamma;
  if (!(ratio <= -1.0))
    throw RegimeMismatch(
        "degenerate Fermi formulas require m alpha / (kB gamma) <= -1");
  return std::acosh(-ratio);
}

}  // namespace detail

/// Degeneracy-regime evaluation of
///   I_nu = int_0^inf cosh(nu rho) / (exp(m alpha/kB + gamma cosh rho) + s) d rho.
inline INuResult I_nu_detailed(int nu, double alpha, double gamma, const RelGas& gas,
                               RelRegime regime = RelRegime::kAuto) {
  gas.validate();
  if (nu < 0) throw DomainError("I_nu: order must be >= 0");
  if (!(gamma > 0.0)) throw DomainError("I_nu: gamma must be positive");
  const double x0 = gas.beta() * alpha;
  const int s = gas.s();

  if (regime == RelRegime::kAuto) {
    if (s == 0) {
      regime = RelRegime::kNonDegenerate;  // exact identity for s = 0
    } else if (x0 >= 15.0) {
      regime = RelRegime::kNonDegenerate;
    } else if (s < 0) {
      if (!(x0 + gamma > 0.0))
        throw DomainError("Bose state at or beyond the condensation line");
      // The r-term series needs ~14/|log10 z| terms; past z = 0.99 the
      // direct quadrature is cheaper and more accurate.
      regime = (std::exp(-(x0 + gamma)) <= 0.99) ? RelRegime::kCompleteBose
                                                 : RelRegime::kNumeric;
    } else {
      regime = RelRegime::kNumeric;
    }
  }

  INuResult out;
  out.regime = regime;
  switch (regime) {
    case RelRegime::kNonDegenerate:
      out.value = std::exp(-(x0 + gamma)) * detail::scaled_bessel_K(nu, gamma);
      return out;
    case RelRegime::kStrongFermi: {
      if (s != 1) throw RegimeMismatch("strongly degenerate formula requires Fermions");
      const double rf = detail::fermi_rho(alpha, gamma, gas);
      const double leading = (nu == 0) ? rf : std::sinh(nu * rf) / nu;
      const double sh = std::sinh(rf), ch = std::cosh(rf);
      const double corr = (M_PI * M_PI / (6.0 * gamma * gamma)) *
                          (nu * std::sinh(nu * rf) * sh - std::cosh(nu * rf) * ch) /
                          (sh * sh * sh);
      out.value = leading + corr;
      return out;
    }
    case RelRegime::kCompleteFermi: {
      if (s != 1) throw RegimeMismatch("completely degenerate formula requires Fermions");
      const double rf = detail::fermi_rho(alpha, gamma, gas);
      out.value = (nu == 0) ? rf : std::sinh(nu * rf) / nu;
      return out;
    }
    case RelRegime::kCompleteBose: {
      if (s != -1) throw RegimeMismatch("Bose series requires Bosons");
      const double z = std::exp(-(x0 + gamma));
      if (!(z < 1.0 - 1e-6))
        throw SeriesDivergence("Bose series parameter too close to condensation");
      double total = 0.0;
      for (int r = 1; r <= 2000000; ++r) {
        const double term =
            std::exp(-r * (x0 + gamma)) * detail::scaled_bessel_K(nu, r * gamma);
        total += term;
        if (term < 1e-14 * total) {
          out.value = total;
          return out;
        }
      }
      throw SeriesDivergence("Bose series did not converge within the term cap");
    }
    case RelRegime::kNumeric:
      out.value = detail::i_nu_numeric(nu, alpha, gamma, gas);
      return out;
    default:
      throw RegimeMismatch("I_nu: unresolved regime");
  }
}

inline double I_nu(int nu, double alpha, double gamma, const RelGas& gas,
                   RelRegime regime = RelRegime::kAuto) {
  return I_nu_detailed(nu, alpha, gamma, gas, regime).value;
}

/// J_{mu,nu} = int_0^inf sinh^mu rho cosh^nu rho / (exp(...) + s) d rho by
/// adaptive quadrature (relative error ~1e-12; the endpoint is
/// regularized by the substitution cosh rho = 1 + t^2).
inline double J_munu(int mu, int nu, double alpha, double gamma, const RelGas& gas) {
  gas.validate();
  if (mu < 0 || nu < 0) throw DomainError("J_munu: orders must be >= 0");
  if (!(gamma > 0.0)) throw DomainError("J_munu: gamma must be positive");
  const double x0 = gas.beta() * alpha;
  const int s = gas.s();
  if (s < 0 && !(x0 + gamma > 0.0))
    throw DomainError("Bose integral diverges at or beyond the condensation line");
  return detail::integrate_half_line([=](double t) {
    const double u = 1.0 + t * t;              // cosh rho
    const double sh = t * std::sqrt(t * t + 2.0);  // sinh rho
    double v = 2.0 / std::sqrt(t * t + 2.0) * detail::occupation(x0 + gamma * u, s);
    for (int k = 0; k < mu; ++k) v *= sh;
    for (int k = 0; k < nu; ++k) v *= u;
    return v;
  });
}

/// The four J-to-I reductions used by the equilibrium variables.
inline double J_from_I(int mu, int nu, double alpha, double gamma, const RelGas& gas,
                       RelRegime regime = RelRegime::kAuto) {
  auto I = [&](int n) { return I_nu(n, alpha, gamma, gas, regime); };
  if (mu == 2 && nu == 1) return 0.25 * (I(3) - I(1));
  if (mu == 2 && nu == 2) return 0.125 * (I(4) - I(0));
  if (mu == 4 && nu == 0) return 0.125 * (I(4) - 4.0 * I(2) + 3.0 * I(0));
  if (mu == 4 && nu == 1) return (I(5) - 3.0 * I(3) + 2.0 * I(1)) / 16.0;
  throw DomainError("J_from_I: no reduction recorded for these orders");
}

/// J'_{mu,nu} = d J_{mu,nu} / d alpha, evaluated through the I_nu
/// reduction formulas (the full recorded relation list).
inline double J_prime(int mu, int nu, double alpha, double gamma, const RelGas& gas,
                      RelRegime regime = RelRegime::kAuto) {
  gas.validate();
  const double pref = -gas.beta() / gamma;
  auto I = [&](int n) { return I_nu(n, alpha, gamma, gas, regime); };
  if (mu == 2 && nu == 1) return pref * I(2);
  if (mu == 2 && nu == 2) return pref * 0.25 * (3.0 * I(3) + I(1));
  if (mu == 2 && nu == 3) return pref * 0.5 * (I(4) + I(2));
  if (mu == 2 && nu == 4) return pref * (5.0 * I(5) + 9.0 * I(3) + 2.0 * I(1)) / 16.0;
  if (mu == 4 && nu == 0) return pref * 0.75 * (I(3) - I(1));
  if (mu == 4 && nu == 1) return pref * 0.5 * (I(4) - I(2));
  if (mu == 4 && nu == 2) return pref * (5.0 * I(5) - 3.0 * I(3) - 2.0 * I(1)) / 16.0;
  if (mu == 4 && nu == 3) return pref * 3.0 / 16.0 * (I(6) - I(2));
  if (mu == 6 && nu == 0) return pref * 5.0 / 16.0 * (I(5) - 3.0 * I(3) + 2.0 * I(1));
  if (mu == 6 && nu == 1) return pref * (6.0 * I(6) - 16.0 * I(4) + 10.0 * I(2)) / 32.0;
  throw DomainError("J_prime: no relation recorded for these orders");
}

// ---------------------------------------------------------------------------
// Equilibrium state and Juttner distribution
// ---------------------------------------------------------------------------

struct RelEquilibrium {
  double alpha = 0.0;  // fugacity, alpha = -g/T
  double gamma = 1.0;  // coldness m c^2 / (kB T)
  double n = 0.0;      // number density
  double e = 0.0;      // energy density
  double p = 0.0;      // pressure
  double T = 0.0;
  RelRegime regime = RelRegime::kNumeric;
};

inline RelEquilibrium equilibrium_state(double alpha, double gamma, const RelGas& gas) {
  gas.validate();
  if (!(gamma > 0.0)) throw DomainError("equilibrium_state: gamma must be positive");
  RelEquilibrium eq;
  eq.alpha = alpha;
  eq.gamma = gamma;
  eq.T = gas.m * gas.c * gas.c / (gas.kB * gamma);
  const double m = gas.m, c = gas.c;
  eq.n = 4.0 * M_PI * gas.Y * m * m * m * c * c * c * J_munu(2, 1, alpha, gamma, gas);
  eq.e = 4.0 * M_PI * gas.Y * m * m * m * m * std::pow(c, 5) *
         J_munu(2, 2, alpha, gamma, gas);
  eq.p = 4.0 / 3.0 * M_PI * gas.Y * m * m * m * m * std::pow(c, 5) *
         J_munu(4, 0, alpha, gamma, gas);
  eq.regime = I_nu_detailed(0, alpha, gamma, gas).regime;
  if (!(eq.n > 0.0) || !(eq.p > 0.0))
    throw DegenerateState("equilibrium_state produced non-positive n or p");
  return eq;
}

/// Juttner distribution in the rest frame (U = (c, 0, 0, 0)):
/// f_J = Y / (exp(m alpha / kB + gamma p^0 / (m c)) + s). The four-momentum
/// must lie on the mass shell p.p = m^2 c^2.
inline double juttner(double alpha, double gamma, const Eigen::Vector4d& p4,
                      const RelGas& gas) {
  gas.validate();
  const double mc2 = gas.m * gas.c * gas.m * gas.c;  // (mc)^2
  const double shell = p4[0] * p4[0] - p4[1] * p4[1] - p4[2] * p4[2] - p4[3] * p4[3];
  if (std::abs(shell - mc2) > 1e-9 * mc2)
    throw OffMassShell("four-momentum is off the mass shell");
  const double x = gas.beta() * alpha + gamma * p4[0] / (gas.m * gas.c);
  return gas.Y * detail::occupation(x, gas.s());
}

// ---------------------------------------------------------------------------
// Fourteen-moment closure coefficients and the triple tensor
// ---------------------------------------------------------------------------

struct ClosureCoefficients {
  double C01 = 0.0;   // C_0^1
  double Cpi1 = 0.0;  // C_pi^1
  double C03 = 0.0;   // C_0^3
  double C05 = 0.0;   // C_0^5
};

inline ClosureCoefficients closure_coefficients(double alpha, double gamma,
                                                const RelGas& gas) {
  gas.validate();
  auto Jp = [&](int mu, int nu) { return J_prime(mu, nu, alpha, gamma, gas); };
  const double n =
      4.0 * M_PI * gas.Y * std::pow(gas.m, 3) * std::pow(gas.c, 3) *
      J_munu(2, 1, alpha, gamma, gas);

  ClosureCoefficients out;
  out.C01 = gas.m * n + 8.0 * M_PI * gas.Y * std::pow(gas.m, 4) * std::pow(gas.c, 3) *
                            J_munu(4, 1, alpha, gamma, gas);

  Eigen::Matrix3d num3, den3;
  num3 << Jp(2, 1), Jp(2, 2), Jp(2, 3),
          Jp(2, 2), Jp(2, 3), Jp(2, 4),
          Jp(4, 1), Jp(4, 2), Jp(4, 3);
  den3 << Jp(2, 1), Jp(2, 2), Jp(2, 3),
          Jp(2, 2), Jp(2, 3), Jp(2, 4),
          Jp(4, 0), Jp(4, 1), Jp(4, 2);
  const double den3v = den3.determinant();
  const double den3scale = std::pow(den3.cwiseAbs().maxCoeff(), 3);
  if (!(std::abs(den3v) > 1e-13 * den3scale))
    throw SingularDenominator("C_pi^1 denominator determinant ~ " +
                              std::to_string(den3v));
  out.Cpi1 = 6.0 / (gas.c * gas.c) * num3.determinant() / den3v;

  Eigen::Matrix2d num2, den2;
  num2 << Jp(4, 0), Jp(4, 1),
          Jp(4, 2), Jp(4, 3);
  den2 << Jp(4, 0), Jp(4, 1),
          Jp(4, 1), Jp(4, 2);
  const double den2v = den2.determinant();
  const double den2scale = std::pow(den2.cwiseAbs().maxCoeff(), 2);
  if (!(std::abs(den2v) > 1e-13 * den2scale))
    throw SingularDenominator("C_0^3 denominator determinant ~ " +
                              std::to_string(den2v));
  out.C03 = -0.2 * num2.determinant() / den2v;

  const double j60 = Jp(6, 0);
  if (!(std::abs(j60) > 0.0))
    throw SingularDenominator("C_0^5 denominator J'_{6,0} vanished");
  out.C05 = Jp(6, 1) / j60;
  return out;
}

/// Minkowski metric diag(+1, -1, -1, -1).
inline double metric(int a, int b) {
  if (a != b) return 0.0;
  return a == 0 ? 1.0 : -1.0;
}

inline double minkowski_dot(const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
  return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
}

/// Pure boost with 3-velocity v (|v| < c).
inline Eigen::Matrix4d lorentz_boost(const std::array<double, 3>& v, double c) {
  const double b2 = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) / (c * c);
  if (!(b2 < 1.0)) throw DomainError("lorentz_boost: speed must be below c");
  Eigen::Matrix4d L = Eigen::Matrix4d::Identity();
  if (b2 == 0.0) return L;
  const double gl = 1.0 / std::sqrt(1.0 - b2);
  for (int i = 0; i < 3; ++i) {
    L(0, i + 1) = L(i + 1, 0) = gl * v[i] / c;
    for (int j = 0; j < 3; ++j)
      L(i + 1, j + 1) += (gl - 1.0) * (v[i] / c) * (v[j] / c) / b2;
  }
  L(0, 0) = gl;
  return L;
}

/// Nonequilibrium 14-moment state: four-velocity, dynamic pressure, heat
/// flux and deviatoric shear, with the orthogonality/trace constraints.
struct RelNoneqState {
  Eigen::Vector4d U{1, 0, 0, 0};
  double Pi = 0.0;
  Eigen::Vector4d q{0, 0, 0, 0};
  Eigen::Matrix4d t = Eigen::Matrix4d::Zero();

  void validate(double c) const {
    const double c2 = c * c;
    if (std::abs(minkowski_dot(U, U) - c2) > 1e-12 * c2)
      throw StateConstraintViolation("U . U != c^2");
    const double qs = q.norm();
    if (qs > 0.0 && std::abs(minkowski_dot(q, U)) > 1e-12 * qs * c)
      throw StateConstraintViolation("q . U != 0");
    const double ts = t.cwiseAbs().maxCoeff();
    if (ts > 0.0) {
      if ((t - t.transpose()).cwiseAbs().maxCoeff() > 1e-12 * ts)
        throw StateConstraintViolation("t is not symmetric");
      Eigen::Vector4d tu = Eigen::Vector4d::Zero();
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) tu[a] += t(a, b) * metric(b, b) * U[b];
      if (tu.cwiseAbs().maxCoeff() > 1e-12 * ts * c)
        throw StateConstraintViolation("t . U != 0");
      double tr = 0.0;
      for (int a = 0; a < 4; ++a) tr += metric(a, a) * t(a, a);
      if (std::abs(tr) > 1e-12 * ts)
        throw StateConstraintViolation("t has nonzero metric trace");
    }
  }
};

/// Rest-frame construction: q = (0, q3), t = spatial symmetric traceless.
inline RelNoneqState rest_frame_state(double Pi, const std::array<double, 3>& q3,
                                      const Eigen::Matrix3d& t3, double c) {
  if (std::abs(t3.trace()) > 1e-12 * (t3.cwiseAbs().maxCoeff() + 1e-300))
    throw StateConstraintViolation("rest_frame_state: t3 must be traceless");
  RelNoneqState st;
  st.U = Eigen::Vector4d(c, 0, 0, 0);
  st.Pi = Pi;
  st.q = Eigen::Vector4d(0, q3[0], q3[1], q3[2]);
  st.t.setZero();
  st.t.block<3, 3>(1, 1) = 0.5 * (t3 + t3.transpose());
  return st;
}

inline RelNoneqState boost_state(const RelNoneqState& st, const std::array<double, 3>& v,
                                 double c) {
  const Eigen::Matrix4d L = lorentz_boost(v, c);
  RelNoneqState out;
  out.U = L * st.U;
  out.Pi = st.Pi;
  out.q = L * st.q;
  out.t = L * st.t * L.transpose();
  return out;
}

/// Symmetric rank-3 tensor on Minkowski indices.
struct Tensor3 {
  std::array<double, 64> data{};
  double& operator()(int a, int b, int c) { return data[(a * 4 + b) * 4 + c]; }
  double operator()(int a, int b, int c) const { return data[(a * 4 + b) * 4 + c]; }
};

inline Tensor3 boost_tensor(const Tensor3& A, const std::array<double, 3>& v, double c) {
  const Eigen::Matrix4d L = lorentz_boost(v, c);
  Tensor3 out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int g = 0; g < 4; ++g) {
        double acc = 0.0;
        for (int m = 0; m < 4; ++m)
          for (int n = 0; n < 4; ++n)
            for (int s = 0; s < 4; ++s) acc += L(a, m) * L(b, n) * L(g, s) * A(m, n, s);
        out(a, b, g) = acc;
      }
  return out;
}

/// Closure of the third moment in terms of the 14 physical variables.
inline Tensor3 triple_tensor(const RelEquilibrium& eq, const RelNoneqState& state,
                             const ClosureCoefficients& coeffs, const RelGas& gas) {
  state.validate(gas.c);
  const double c2 = gas.c * gas.c;
  const double rho = eq.n * gas.m;  // rest-mass density n m
  const double cu = coeffs.C01 + coeffs.Cpi1 * state.Pi;
  const double cg = (c2 / 6.0) * (rho - cu);

  Tensor3 A;
  const auto& U = state.U;
  const auto& q = state.q;
  const auto& t = state.t;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int g = 0; g < 4; ++g) {
        double val = cu * U[a] * U[b] * U[g];
        val += cg * (metric(a, b) * U[g] + metric(a, g) * U[b] + metric(b, g) * U[a]);
        val += coeffs.C03 *
               (metric(a, b) * q[g] + metric(a, g) * q[b] + metric(b, g) * q[a]);
        val += -(6.0 / c2) * coeffs.C03 *
               (U[a] * U[b] * q[g] + U[a] * U[g] * q[b] + U[b] * U[g] * q[a]);
        val += coeffs.C05 * (t(a, b) * U[g] + t(a, g) * U[b] + t(b, g) * U[a]);
        A(a, b, g) = val;
      }
  return A;
}

/// Metric contraction g_{bc} A^{abc}; the q and t contributions cancel
/// identically, leaving a vector proportional to U^a.
inline Eigen::Vector4d metric_contraction(const Tensor3& A) {
  Eigen::Vector4d out = Eigen::Vector4d::Zero();
  for (int a = 0; a < 4; ++a)
    out[a] = A(a, 0, 0) - A(a, 1, 1) - A(a, 2, 2) - A(a, 3, 3);
  return out;
}

/// Number of classical moments matching a relativistic hierarchy
/// truncated at tensorial index N: (N+1)(N+2)(2N+3)/6.
inline long long classical_moment_count(int N) {
  if (N < 1) throw DomainError("classical_moment_count: N must be >= 1");
  const long long n = N;
  return (n + 1) * (n + 2) * (2 * n + 3) / 6;
}

}  // namespace maxent::rel
