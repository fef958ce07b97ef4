#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "maxent/closures.hpp"
#include "maxent/dual_solver.hpp"

namespace maxent {

/// Symmetric first-order system in the multiplier field:
/// A0 d_t Lambda + Ai d_i Lambda = production. A0 is the sign-adjusted
/// Hessian -m int F'' xi_A xi_B (positive-definite at admissible states).
struct HyperbolicSystem {
  Eigen::MatrixXd A0;
  std::array<Eigen::MatrixXd, 3> Ai;
  const MomentBasis* basis = nullptr;
  ConservedProjection state;   // equilibrium projection of the moments
  double asymmetry = 0.0;      // recorded residual before symmetrization
};

inline HyperbolicSystem assemble_system(const MultiplierVector& lambda,
                                        const GasModel& gas, const Quadrature& quad) {
  const MomentBasis& basis = *lambda.basis;
  gas.validate();
  PartitionFunction part(gas);
  const std::size_t n = basis.size();
  const int pmax = 2 * basis.max_velocity_degree() + 2;

  const std::vector<double> W = detail::grid_weights(quad);
  const Eigen::MatrixXd B = detail::design_matrix(basis, quad, gas.m);
  const Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(lambda.values.data(), n);
  const Eigen::VectorXd chi = B * lam;
  if (part.statistics() < 0) {
    const double floor = part.bose_floor() / part.beta();
    if ((chi.array() < floor).any())
      throw DomainError("multipliers leave the Bose domain on the quadrature grid");
  }
  std::vector<double> wfpp(W.size()), wfp(W.size());
  for (std::size_t r = 0; r < W.size(); ++r) {
    wfpp[r] = W[r] * part.Fpp(chi[r]);
    wfp[r] = W[r] * part.Fp(chi[r]);
  }
  MomentTable tpp(wfpp, quad, pmax), tf(wfp, quad, pmax);

  HyperbolicSystem sys;
  sys.basis = &basis;
  MomentVector mom(basis);
  for (std::size_t a = 0; a < n; ++a)
    mom[a] = gas.m * tf.entry_moment(basis.entry(a), gas.m);
  sys.state = conserved_projection(mom, gas);

  const BasisTerm xi_term[3] = {{1.0, {1, 0, 0}, 0}, {1.0, {0, 1, 0}, 0},
                                {1.0, {0, 0, 1}, 0}};
  auto fill = [&](Eigen::MatrixXd& M, const BasisTerm* dir) {
    M.resize(n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        double val = 0.0;
        for (const auto& ta : basis.entry(a))
          for (const auto& tb : basis.entry(b)) {
            BasisTerm prod;
            prod.coef = ta.coef * tb.coef;
            prod.idx = {ta.idx.p + tb.idx.p, ta.idx.q + tb.idx.q, ta.idx.r + tb.idx.r};
            prod.e = ta.e + tb.e;
            if (dir) {
              prod.idx.p += dir->idx.p;
              prod.idx.q += dir->idx.q;
              prod.idx.r += dir->idx.r;
            }
            val += tpp.term_moment(prod, gas.m);
          }
        M(a, b) = -gas.m * val;  // sign-adjusted to the positive convention
      }
    const double scale = M.cwiseAbs().maxCoeff();
    const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
    sys.asymmetry = std::max(sys.asymmetry, scale > 0.0 ? asym / scale : 0.0);
    M = 0.5 * (M + M.transpose()).eval();
  };
  fill(sys.A0, nullptr);
  for (int d = 0; d < 3; ++d) fill(sys.Ai[d], &xi_term[d]);
  return sys;
}

/// Characteristic speeds in direction n: real spectrum of the symmetric
/// pencil (Ai n_i) x = lambda A0 x, solved by congruence reduction with
/// the Cholesky factor of A0.
struct SpeedSpectrum {
  std::array<double, 3> direction{1, 0, 0};
  std::vector<double> eigenvalues;  // ascending
  double lambda_max = 0.0;
  double c0 = 0.0;  // monatomic equilibrium sound speed sqrt(5 p / (3 rho))
};

inline SpeedSpectrum characteristic_speeds(const HyperbolicSystem& sys,
                                           const std::array<double, 3>& n) {
  const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  if (!(norm > 0.0)) throw DomainError("characteristic_speeds: zero direction");
  Eigen::MatrixXd An = (n[0] * sys.Ai[0] + n[1] * sys.Ai[1] + n[2] * sys.Ai[2]) / norm;

  Eigen::LLT<Eigen::MatrixXd> llt(sys.A0);
  if (llt.info() != Eigen::Success)
    throw NotHyperbolic("temporal matrix A0 is not positive-definite");
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd M =
      L.triangularView<Eigen::Lower>().solve(
          L.triangularView<Eigen::Lower>().solve(An).transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));

  SpeedSpectrum sp;
  sp.direction = {n[0] / norm, n[1] / norm, n[2] / norm};
  sp.eigenvalues.assign(es.eigenvalues().data(),
                        es.eigenvalues().data() + es.eigenvalues().size());
  sp.lambda_max = sp.eigenvalues.back();
  sp.c0 = std::sqrt(5.0 * sys.state.theta / 3.0);
  return sp;
}

/// Equilibrium lower bound for the maximum characteristic speed:
/// lambda_max / c0 >= sqrt((6/5)(N - 1/2)).
struct LowerBoundCheck {
  double bound = 0.0;
  bool satisfied = false;
  double margin = 0.0;  // lambda_max / c0 - bound
};

inline double speed_lower_bound(int N) { return std::sqrt(1.2 * (N - 0.5)); }

inline LowerBoundCheck check_lower_bound(int N, const SpeedSpectrum& spectrum) {
  LowerBoundCheck out;
  out.bound = speed_lower_bound(N);
  const double ratio = spectrum.lambda_max / spectrum.c0;
  out.margin = ratio - out.bound;
  out.satisfied = ratio >= out.bound - 1e-9;
  return out;
}

// ---------------------------------------------------------------------------
// Hyperbolicity region of the linearized 13-moment closure
// ---------------------------------------------------------------------------

struct RegionScanConfig {
  int grid_sigma = 101;
  int grid_q = 101;
  double sigma_max = 1.5;  // |sigma| / p range
  double q_max = 1.5;      // |q| / (p c0) range
  int directions = 13;     // sampled unit vectors (icosahedral)
  int quad_order = 8;
  double rho = 1.0;
  double T = 1.0;
  GasModel gas{};
};

struct RegionMask {
  std::vector<double> sigma_over_p;  // grid axis values
  std::vector<double> q_norm;
  std::vector<std::uint8_t> mask;    // row-major over (sigma, q)

  std::uint8_t at(int i, int j) const { return mask[i * q_norm.size() + j]; }
};

namespace detail {

inline std::vector<Eigen::Vector3d> scan_directions(int count) {
  std::vector<Eigen::Vector3d> all = icosphere_vertices(1);
  std::vector<Eigen::Vector3d> unique;
  for (const auto& v : all) {
    bool dup = false;
    for (const auto& u : unique)
      if ((u + v).norm() < 1e-12 || (u - v).norm() < 1e-12) dup = true;
    if (!dup) unique.push_back(v);
    if (static_cast<int>(unique.size()) == count) break;
  }
  return unique;
}

}  // namespace detail

/// Scans the (sigma/p, q/(p c0)) plane of uniaxial 13-moment states. For
/// each state the closed flux map of the linearized closure is
/// differentiated numerically and the state is marked hyperbolic iff the
/// state is valid (pressure tensor positive-definite, so the entropy
/// Hessian/temporal matrix is definite) and every sampled directional
/// Jacobian has a real spectrum.
inline RegionMask hyperbolicity_region_scan(const RegionScanConfig& cfg) {
  const MomentBasis basis = thirteen_moment_basis();
  const std::size_t n = basis.size();
  const GasModel& gas = cfg.gas;
  const double theta = gas.kB * cfg.T / gas.m;
  const double p = cfg.rho * theta;
  const double c0 = std::sqrt(5.0 * theta / 3.0);

  RegionMask out;
  out.sigma_over_p.resize(cfg.grid_sigma);
  out.q_norm.resize(cfg.grid_q);
  for (int i = 0; i < cfg.grid_sigma; ++i)
    out.sigma_over_p[i] =
        cfg.grid_sigma == 1 ? 0.0
                            : -cfg.sigma_max + 2.0 * cfg.sigma_max * i / (cfg.grid_sigma - 1);
  for (int j = 0; j < cfg.grid_q; ++j)
    out.q_norm[j] =
        cfg.grid_q == 1 ? 0.0 : -cfg.q_max + 2.0 * cfg.q_max * j / (cfg.grid_q - 1);
  out.mask.assign(cfg.grid_sigma * cfg.grid_q, 0);

  // Base quadrature: recentered at rest, scaled to theta; polynomial
  // integrands of the linearized closure are integrated exactly.
  MomentVector eq = equilibrium_moments(basis, cfg.rho, {0, 0, 0}, cfg.T, gas);
  const Quadrature quad = adapt_quadrature(eq, cfg.quad_order, gas);
  const auto dirs = detail::scan_directions(cfg.directions);

  const std::size_t i_sxx = *basis.find(2, 0, 0);
  const std::size_t i_syy = *basis.find(0, 2, 0);
  const std::size_t i_szz = *basis.find(0, 0, 2);

  auto state_at = [&](double shat, double qhat) {
    MomentVector u = eq;
    u[i_sxx] += shat * p;
    u[i_syy] += -0.5 * shat * p;
    u[i_szz] += -0.5 * shat * p;
    u.values[10] += 2.0 * qhat * p * c0;  // xi^2 xi_1 entry (v = 0: F_ll1 = 2 q_1)
    return u;
  };
  auto flux_of = [&](const MomentVector& u) {
    return linearized_closure(u, gas, quad).fluxes;
  };

  for (int i = 0; i < cfg.grid_sigma; ++i) {
    for (int j = 0; j < cfg.grid_q; ++j) {
      const double shat = out.sigma_over_p[i];
      const double qhat = out.q_norm[j];
      // Pressure tensor p diag(1 + s, 1 - s/2, 1 - s/2) must be PD.
      if (!(1.0 + shat > 0.0) || !(1.0 - 0.5 * shat > 0.0)) continue;

      bool ok = true;
      std::array<Eigen::MatrixXd, 3> J;
      for (auto& m : J) m.resize(n, n);
      try {
        const MomentVector u0 = state_at(shat, qhat);
        for (std::size_t b = 0; b < n && ok; ++b) {
          const double scale =
              cfg.rho * std::pow(theta, 0.5 * entry_velocity_degree(basis.entry(b)));
          const double h = 1e-6 * scale;
          MomentVector up = u0, um = u0;
          up.values[b] += h;
          um.values[b] -= h;
          const auto fp = flux_of(up);
          const auto fm = flux_of(um);
          for (int d = 0; d < 3; ++d)
            for (std::size_t a = 0; a < n; ++a)
              J[d](a, b) = (fp[d][a] - fm[d][a]) / (2.0 * h);
        }
      } catch (const Error&) {
        ok = false;
      }
      if (ok) {
        for (const auto& dir : dirs) {
          const Eigen::MatrixXd Jn = dir[0] * J[0] + dir[1] * J[1] + dir[2] * J[2];
          Eigen::EigenSolver<Eigen::MatrixXd> es(Jn, false);
          const double im = es.eigenvalues().imag().cwiseAbs().maxCoeff();
          const double re = es.eigenvalues().real().cwiseAbs().maxCoeff();
          if (im > 1e-7 * (re + c0)) {
            ok = false;
            break;
          }
        }
      }
      if (ok) out.mask[i * cfg.grid_q + j] = 1;
    }
  }
  return out;
}

}  // namespace maxent
