#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "maxent/basis.hpp"

namespace maxent {

struct AdmissibilityReport {
  bool admissible = false;
  double a_N = 0.0;                       // max of nu_N over the unit sphere
  std::array<double, 3> argmax{1, 0, 0};  // maximizing direction
  int order = 0;
};

namespace detail {

/// Unit icosphere vertices: icosahedron refined `levels` times
/// (12 -> 42 -> 162 vertices).
inline std::vector<Eigen::Vector3d> icosphere_vertices(int levels = 2) {
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Eigen::Vector3d> verts = {
      {-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Eigen::Vector3d m = (verts[a] + verts[b]).normalized();
      verts.push_back(m);
      const int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& f : faces) {
      const int a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces = std::move(next);
  }
  return verts;
}

/// Homogeneous polynomial sum c_alpha t^alpha with gradient and Hessian.
struct SpherePoly {
  std::vector<double> coef;
  std::vector<MultiIndex> idx;

  double value(const Eigen::Vector3d& t) const {
    double v = 0.0;
    for (std::size_t a = 0; a < coef.size(); ++a)
      v += coef[a] * std::pow(t[0], idx[a].p) * std::pow(t[1], idx[a].q) *
           std::pow(t[2], idx[a].r);
    return v;
  }
  Eigen::Vector3d gradient(const Eigen::Vector3d& t) const {
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (std::size_t a = 0; a < coef.size(); ++a) {
      const int pw[3] = {idx[a].p, idx[a].q, idx[a].r};
      for (int d = 0; d < 3; ++d) {
        if (pw[d] == 0) continue;
        double v = coef[a] * pw[d];
        for (int e = 0; e < 3; ++e) v *= std::pow(t[e], d == e ? pw[e] - 1 : pw[e]);
        g[d] += v;
      }
    }
    return g;
  }
  Eigen::Matrix3d hessian(const Eigen::Vector3d& t) const {
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (std::size_t a = 0; a < coef.size(); ++a) {
      const int pw[3] = {idx[a].p, idx[a].q, idx[a].r};
      for (int d1 = 0; d1 < 3; ++d1)
        for (int d2 = 0; d2 < 3; ++d2) {
          int dp[3] = {pw[0], pw[1], pw[2]};
          double fac = coef[a];
          fac *= dp[d1];
          if (fac == 0.0) continue;
          dp[d1] -= 1;
          fac *= dp[d2];
          if (fac == 0.0) continue;
          dp[d2] -= 1;
          double v = fac;
          for (int e = 0; e < 3; ++e) v *= std::pow(t[e], dp[e]);
          h(d1, d2) += v;
        }
    }
    return h;
  }
};

/// Maximizes a homogeneous polynomial on the unit sphere: icosahedral
/// sampling followed by tangent-space Newton refinement of the best
/// candidates. Tolerance ~1e-8 on the maximum.
inline void maximize_on_sphere(const SpherePoly& poly, double& best,
                               Eigen::Vector3d& arg) {
  static const std::vector<Eigen::Vector3d> samples = icosphere_vertices(2);
  best = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, Eigen::Vector3d>> ranked;
  ranked.reserve(samples.size());
  for (const auto& t : samples) ranked.emplace_back(poly.value(t), t);
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  best = ranked.front().first;
  arg = ranked.front().second;

  const int refine_count = std::min<std::size_t>(8, ranked.size());
  for (int c = 0; c < refine_count; ++c) {
    Eigen::Vector3d t = ranked[c].second;
    double val = ranked[c].first;
    for (int it = 0; it < 60; ++it) {
      const Eigen::Vector3d g = poly.gradient(t);
      const double lambda = t.dot(g);
      const Eigen::Vector3d gt = g - lambda * t;  // tangential gradient
      if (gt.norm() < 1e-12 * (1.0 + std::abs(val))) break;
      // Orthonormal tangent frame.
      Eigen::Vector3d u = t.unitOrthogonal();
      Eigen::Vector3d w = t.cross(u);
      Eigen::Matrix<double, 3, 2> P;
      P.col(0) = u;
      P.col(1) = w;
      const Eigen::Matrix3d H = poly.hessian(t);
      const Eigen::Matrix2d Ht = P.transpose() * (H - lambda * Eigen::Matrix3d::Identity()) * P;
      const Eigen::Vector2d gt2 = P.transpose() * gt;
      Eigen::Vector2d step;
      const Eigen::Matrix2d Hreg = Ht - 1e-14 * Eigen::Matrix2d::Identity();
      bool newton_ok = false;
      const double det = Hreg.determinant();
      if (std::abs(det) > 1e-300) {
        step = -Hreg.inverse() * gt2;
        // Accept Newton only as an ascent-compatible step.
        newton_ok = step.dot(gt2) > 0.0 && step.norm() < 1.0;
      }
      if (!newton_ok) step = gt2 / std::max(1.0, gt2.norm());
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 40; ++ls) {
        const Eigen::Vector3d cand = (t + alpha * (P * step)).normalized();
        const double cv = poly.value(cand);
        if (cv > val) {
          t = cand;
          val = cv;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    if (val > best) {
      best = val;
      arg = t;
    }
  }
}

}  // namespace detail

/// Leading-order direction form of the multipliers, evaluated with the
/// main-field components u' = -Lambda (the sign in which the maximizing
/// distribution decays iff nu_N < 0 in every direction):
///   nu_N(t) = sum_{|alpha| = N} (-Lambda_alpha) t^alpha.
inline double nu_N(const MultiplierVector& lambda, const std::array<double, 3>& t) {
  const MomentBasis& b = *lambda.basis;
  const int N = b.truncation_order();
  double v = 0.0;
  for (std::size_t a = 0; a < b.size(); ++a) {
    const auto& entry = b.entry(a);
    if (entry.size() != 1 || entry[0].e != 0 || entry[0].idx.order() != N) continue;
    v += -lambda[a] * std::pow(t[0], entry[0].idx.p) * std::pow(t[1], entry[0].idx.q) *
         std::pow(t[2], entry[0].idx.r);
  }
  return v;
}

/// Integrability test of the nonlinear closure: admissible iff N is even
/// and max_t nu_N(t) < 0. Report-only; a_N carries the sphere maximum.
inline AdmissibilityReport admissibility_check(const MultiplierVector& lambda) {
  const MomentBasis& b = *lambda.basis;
  const int N = b.truncation_order();
  AdmissibilityReport rep;
  rep.order = N;

  detail::SpherePoly poly;
  for (std::size_t a = 0; a < b.size(); ++a) {
    const auto& entry = b.entry(a);
    if (entry.size() != 1 || entry[0].e != 0 || entry[0].idx.order() != N) continue;
    poly.coef.push_back(-lambda[a] * entry[0].coef);
    poly.idx.push_back(entry[0].idx);
  }
  if (poly.coef.empty()) {
    rep.a_N = 0.0;
    rep.admissible = false;
    return rep;
  }
  if (b.dim() == 1) {
    const double vp = poly.value({1, 0, 0});
    const double vm = poly.value({-1, 0, 0});
    rep.a_N = std::max(vp, vm);
    rep.argmax = {vp >= vm ? 1.0 : -1.0, 0, 0};
  } else {
    double best;
    Eigen::Vector3d arg;
    detail::maximize_on_sphere(poly, best, arg);
    rep.a_N = best;
    rep.argmax = {arg[0], arg[1], arg[2]};
  }
  rep.admissible = (N % 2 == 0) && (rep.a_N < 0.0);
  return rep;
}

}  // namespace maxent
