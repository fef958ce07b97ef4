#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "maxent/basis.hpp"
#include "maxent/errors.hpp"
#include "maxent/gas_model.hpp"

namespace maxent {

/// One quadrature axis in plain measure: sum_k w_k g(x_k) ~ integral of g.
struct QuadratureAxis {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

namespace detail {

// Golub-Welsch: nodes/weights of the orthogonal-polynomial rule from the
// symmetric tridiagonal Jacobi matrix (diag, offdiag), mu0 = integral of
// the weight function.
inline void golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                         double mu0, std::vector<double>& nodes,
                         std::vector<double>& weights) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  const auto n = diag.size();
  nodes.resize(n);
  weights.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    nodes[k] = es.eigenvalues()[k];
    const double v0 = es.eigenvectors()(0, k);
    weights[k] = mu0 * v0 * v0;
  }
}

}  // namespace detail

/// Gauss-Hermite rule for weight exp(-x^2): sum w_k g(x_k) ~ int g exp(-x^2).
inline QuadratureAxis gauss_hermite(int n) {
  if (n < 1 || n > 200) throw DomainError("gauss_hermite: order must be in [1, 200]");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(0.5 * k);
  QuadratureAxis ax;
  detail::golub_welsch(diag, off, std::sqrt(M_PI), ax.nodes, ax.weights);
  // Symmetrize node pairs so odd moments cancel exactly.
  for (int k = 0; k < n / 2; ++k) {
    const int j = n - 1 - k;
    const double x = 0.5 * (ax.nodes[j] - ax.nodes[k]);
    ax.nodes[k] = -x;
    ax.nodes[j] = x;
    const double w = 0.5 * (ax.weights[k] + ax.weights[j]);
    ax.weights[k] = ax.weights[j] = w;
  }
  if (n % 2 == 1) ax.nodes[n / 2] = 0.0;
  return ax;
}

/// Generalized Gauss-Laguerre rule for weight x^a exp(-x) on [0, inf).
inline QuadratureAxis gauss_laguerre(int n, double a) {
  if (n < 1 || n > 150) throw DomainError("gauss_laguerre: order must be in [1, 150]");
  if (!(a > -1.0)) throw DomainError("gauss_laguerre: exponent must be > -1");
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + a + 1.0;
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(k * (k + a));
  QuadratureAxis ax;
  detail::golub_welsch(diag, off, std::tgamma(a + 1.0), ax.nodes, ax.weights);
  return ax;
}

/// Tensor-product quadrature over velocity space (optionally times the
/// internal-energy half line). Axes are stored in plain measure, so
///   sum_nodes weight * g(node)  ~  int g(xi) dxi          (classical)
///   sum_nodes weight * g(node)  ~  int g(xi, I) phi(I) dI dxi  (extended),
/// i.e. the state density phi(I) = I^a is absorbed into the I weights.
class Quadrature {
 public:
  std::array<QuadratureAxis, 3> axis;        // velocity axes, plain measure
  QuadratureAxis internal;                   // empty when classical
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::array<double, 3> scale{1.0, 1.0, 1.0};
  double internal_scale = 1.0;               // Laguerre stretch theta
  double internal_alpha = 0.0;               // phi exponent a

  bool has_internal() const { return !internal.nodes.empty(); }
  std::size_t velocity_points() const {
    return axis[0].size() * axis[1].size() * axis[2].size();
  }
  std::size_t total_points() const {
    return velocity_points() * (has_internal() ? internal.size() : 1);
  }

  /// Integrates the grid's native normalized weight (a unit Gaussian in
  /// velocity, times the normalized internal-mode marginal). Exact value
  /// is 1; used as a construction self-test.
  double self_test() const {
    double total = 0.0;
    const double norm0 = 1.0 / (std::pow(M_PI, 1.5) * scale[0] * scale[1] * scale[2]);
    for (std::size_t i = 0; i < axis[0].size(); ++i)
      for (std::size_t j = 0; j < axis[1].size(); ++j)
        for (std::size_t k = 0; k < axis[2].size(); ++k) {
          const double u0 = (axis[0].nodes[i] - center[0]) / scale[0];
          const double u1 = (axis[1].nodes[j] - center[1]) / scale[1];
          const double u2 = (axis[2].nodes[k] - center[2]) / scale[2];
          total += axis[0].weights[i] * axis[1].weights[j] * axis[2].weights[k] *
                   norm0 * std::exp(-u0 * u0 - u1 * u1 - u2 * u2);
        }
    if (has_internal()) {
      double ti = 0.0;
      const double normI =
          1.0 / (std::tgamma(internal_alpha + 1.0) *
                 std::pow(internal_scale, internal_alpha + 1.0));
      for (std::size_t l = 0; l < internal.size(); ++l)
        ti += internal.weights[l] * normI * std::exp(-internal.nodes[l] / internal_scale);
      total *= ti;
    }
    return total;
  }
};

namespace detail {

inline QuadratureAxis transformed_hermite(int n, double center, double scale) {
  QuadratureAxis base = gauss_hermite(n);
  QuadratureAxis out;
  out.nodes.resize(base.size());
  out.weights.resize(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    const double x = base.nodes[k];
    out.nodes[k] = center + scale * x;
    out.weights[k] = scale * base.weights[k] * std::exp(x * x);
  }
  return out;
}

inline QuadratureAxis transformed_laguerre(int n, double a, double theta) {
  QuadratureAxis base = gauss_laguerre(n, a);
  QuadratureAxis out;
  out.nodes.resize(base.size());
  out.weights.resize(base.size());
  const double pref = std::pow(theta, a + 1.0);
  for (std::size_t k = 0; k < base.size(); ++k) {
    const double u = base.nodes[k];
    out.nodes[k] = theta * u;
    out.weights[k] = pref * base.weights[k] * std::exp(u);
  }
  return out;
}

inline QuadratureAxis point_axis() {
  QuadratureAxis ax;
  ax.nodes = {0.0};
  ax.weights = {1.0};
  return ax;
}

}  // namespace detail

/// Hermite grid with per-axis center/scale (scale s matches a Gaussian of
/// variance s^2/2 per axis). dim = 1 keeps only the first velocity axis.
inline Quadrature make_quadrature(int order, std::array<double, 3> center,
                                  std::array<double, 3> scale, int dim = 3) {
  Quadrature q;
  q.center = center;
  q.scale = scale;
  for (int d = 0; d < 3; ++d) {
    if (!(scale[d] > 0.0)) throw DegenerateState("make_quadrature: scale must be positive");
    q.axis[d] = (d < dim) ? detail::transformed_hermite(order, center[d], scale[d])
                          : detail::point_axis();
  }
  return q;
}

/// Appends the internal-energy axis: weight phi(I) = I^a absorbed, nodes
/// stretched by theta (the decay scale of the equilibrium marginal).
inline void attach_internal_axis(Quadrature& q, int order, double a, double theta) {
  if (!(theta > 0.0)) throw DegenerateState("attach_internal_axis: theta must be positive");
  q.internal = detail::transformed_laguerre(order, a, theta);
  q.internal_scale = theta;
  q.internal_alpha = a;
}

/// Evaluates f(xi, I) over the whole grid in lexicographic (i, j, k, l)
/// order, returning weighted values w * f. Throws NonFiniteIntegrand on
/// non-finite values.
template <typename F>
std::vector<double> weighted_values(F&& f, const Quadrature& quad) {
  const std::size_t nI = quad.has_internal() ? quad.internal.size() : 1;
  std::vector<double> out;
  out.reserve(quad.velocity_points() * nI);
  for (std::size_t i = 0; i < quad.axis[0].size(); ++i)
    for (std::size_t j = 0; j < quad.axis[1].size(); ++j)
      for (std::size_t k = 0; k < quad.axis[2].size(); ++k) {
        const std::array<double, 3> xi{quad.axis[0].nodes[i], quad.axis[1].nodes[j],
                                       quad.axis[2].nodes[k]};
        const double wv = quad.axis[0].weights[i] * quad.axis[1].weights[j] *
                          quad.axis[2].weights[k];
        for (std::size_t l = 0; l < nI; ++l) {
          const double I = quad.has_internal() ? quad.internal.nodes[l] : 0.0;
          const double wI = quad.has_internal() ? quad.internal.weights[l] : 1.0;
          const double v = f(xi, I);
          if (!std::isfinite(v))
            throw NonFiniteIntegrand("integrand evaluated to a non-finite value");
          out.push_back(wv * wI * v);
        }
      }
  return out;
}

/// Monomial moments of a weighted grid function: after construction,
/// moment(p, q, r, s) = sum_nodes values * xi1^p xi2^q xi3^r I^s.
/// The reduction is done axis by axis, so the cost is O(points * pmax)
/// rather than O(points * #moments).
class MomentTable {
 public:
  MomentTable(const std::vector<double>& weighted, const Quadrature& quad, int pmax,
              int smax = 2)
      : pmax_(pmax), smax_(smax) {
    const std::size_t nx = quad.axis[0].size(), ny = quad.axis[1].size(),
                      nz = quad.axis[2].size();
    const std::size_t nI = quad.has_internal() ? quad.internal.size() : 1;
    const int P = pmax_ + 1, S = smax_ + 1;

    // I-axis first: g0[(i*ny+j)*nz+k][s]
    std::vector<double> g0(nx * ny * nz * S, 0.0);
    for (std::size_t v = 0; v < nx * ny * nz; ++v) {
      for (std::size_t l = 0; l < nI; ++l) {
        const double val = weighted[v * nI + l];
        double Ipow = 1.0;
        const double I = quad.has_internal() ? quad.internal.nodes[l] : 0.0;
        for (int s = 0; s < S; ++s) {
          g0[v * S + s] += val * Ipow;
          Ipow *= I;
        }
      }
    }
    // x-axis
    std::vector<double> g1(P * ny * nz * S, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = quad.axis[0].nodes[i];
      double xpow = 1.0;
      for (int p = 0; p < P; ++p) {
        for (std::size_t jk = 0; jk < ny * nz; ++jk)
          for (int s = 0; s < S; ++s)
            g1[(p * ny * nz + jk) * S + s] += xpow * g0[(i * ny * nz + jk) * S + s];
        xpow *= x;
      }
    }
    // y-axis
    std::vector<double> g2(P * P * nz * S, 0.0);
    for (std::size_t j = 0; j < ny; ++j) {
      const double y = quad.axis[1].nodes[j];
      double ypow = 1.0;
      for (int qy = 0; qy < P; ++qy) {
        for (int p = 0; p < P; ++p)
          for (std::size_t k = 0; k < nz; ++k)
            for (int s = 0; s < S; ++s)
              g2[(((p * P) + qy) * nz + k) * S + s] +=
                  ypow * g1[(p * ny * nz + j * nz + k) * S + s];
        ypow *= y;
      }
    }
    // z-axis
    table_.assign(P * P * P * S, 0.0);
    for (std::size_t k = 0; k < nz; ++k) {
      const double z = quad.axis[2].nodes[k];
      double zpow = 1.0;
      for (int r = 0; r < P; ++r) {
        for (int p = 0; p < P; ++p)
          for (int qy = 0; qy < P; ++qy)
            for (int s = 0; s < S; ++s)
              table_[(((p * P + qy) * P + r) * S) + s] +=
                  zpow * g2[(((p * P) + qy) * nz + k) * S + s];
        zpow *= z;
      }
    }
  }

  double moment(int p, int q, int r, int s = 0) const {
    const int P = pmax_ + 1, S = smax_ + 1;
    return table_[(((p * P + q) * P + r) * S) + s];
  }

  /// Moment of one basis term; particle mass is needed to expand the
  /// energy weight (xi^2 + 2 I / m)^e.
  double term_moment(const BasisTerm& t, double mass) const {
    const int p = t.idx.p, q = t.idx.q, r = t.idx.r;
    switch (t.e) {
      case 0:
        return t.coef * moment(p, q, r, 0);
      case 1:
        return t.coef * (moment(p + 2, q, r, 0) + moment(p, q + 2, r, 0) +
                         moment(p, q, r + 2, 0) + (2.0 / mass) * moment(p, q, r, 1));
      case 2: {
        double xi4 = 0.0;
        const int dp[3][3] = {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}};
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            xi4 += moment(p + dp[a][0] + dp[b][0], q + dp[a][1] + dp[b][1],
                          r + dp[a][2] + dp[b][2], 0);
        const double cross = moment(p + 2, q, r, 1) + moment(p, q + 2, r, 1) +
                             moment(p, q, r + 2, 1);
        return t.coef * (xi4 + (4.0 / mass) * cross +
                         (4.0 / (mass * mass)) * moment(p, q, r, 2));
      }
      default:
        throw DomainError("MomentTable: energy-weight power not supported");
    }
  }

  double entry_moment(const BasisEntry& entry, double mass) const {
    double total = 0.0;
    for (const auto& t : entry) total += term_moment(t, mass);
    return total;
  }

  /// Moment of the product of two terms (powers and energy weights add).
  double product_moment(const BasisTerm& a, const BasisTerm& b, double mass) const {
    BasisTerm prod;
    prod.coef = a.coef * b.coef;
    prod.idx = {a.idx.p + b.idx.p, a.idx.q + b.idx.q, a.idx.r + b.idx.r};
    prod.e = a.e + b.e;
    return term_moment(prod, mass);
  }

  double entry_product_moment(const BasisEntry& ea, const BasisEntry& eb,
                              double mass) const {
    double total = 0.0;
    for (const auto& a : ea)
      for (const auto& b : eb) total += product_moment(a, b, mass);
    return total;
  }

  int pmax() const { return pmax_; }

 private:
  int pmax_;
  int smax_;
  std::vector<double> table_;
};

/// Evaluates the basis entries at one phase-space node.
inline double evaluate_term(const BasisTerm& t, const std::array<double, 3>& xi, double I,
                            double mass) {
  double v = t.coef;
  for (int c = 0; c < t.idx.p; ++c) v *= xi[0];
  for (int c = 0; c < t.idx.q; ++c) v *= xi[1];
  for (int c = 0; c < t.idx.r; ++c) v *= xi[2];
  if (t.e > 0) {
    const double w = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2] + 2.0 * I / mass;
    for (int c = 0; c < t.e; ++c) v *= w;
  }
  return v;
}

inline double evaluate_entry(const BasisEntry& entry, const std::array<double, 3>& xi,
                             double I, double mass) {
  double v = 0.0;
  for (const auto& t : entry) v += evaluate_term(t, xi, I, mass);
  return v;
}

}  // namespace maxent
