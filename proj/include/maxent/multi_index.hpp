#pragma once

#include <array>
#include <cstdint>
#include <tuple>
#include <vector>

namespace maxent {

/// Powers (p, q, r) of the velocity monomial xi_1^p xi_2^q xi_3^r.
struct MultiIndex {
  int p = 0;
  int q = 0;
  int r = 0;

  int order() const noexcept { return p + q + r; }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) noexcept {
    return a.p == b.p && a.q == b.q && a.r == b.r;
  }
  // Basis ordering: lexicographic on (order, p, q, r).
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) noexcept {
    return std::tuple(a.order(), a.p, a.q, a.r) < std::tuple(b.order(), b.p, b.q, b.r);
  }
};

/// One term of a basis polynomial:
///   coef * xi_1^p xi_2^q xi_3^r * (xi^2 + 2 I / m)^e.
/// Classical monomials have e = 0; the energy-weighted entries of the
/// extended phase space carry e = 1.
struct BasisTerm {
  double coef = 1.0;
  MultiIndex idx{};
  int e = 0;

  /// Polynomial degree in velocity (the energy weight counts as 2).
  int velocity_degree() const noexcept { return idx.order() + 2 * e; }
};

/// A basis entry is a short polynomial; monomial entries hold one term.
using BasisEntry = std::vector<BasisTerm>;

inline BasisEntry monomial_entry(int p, int q, int r) {
  return {BasisTerm{1.0, {p, q, r}, 0}};
}

inline int entry_velocity_degree(const BasisEntry& entry) {
  int d = 0;
  for (const auto& t : entry) d = std::max(d, t.velocity_degree());
  return d;
}

}  // namespace maxent
