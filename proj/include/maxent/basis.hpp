#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "maxent/errors.hpp"
#include "maxent/multi_index.hpp"

namespace maxent {

enum class PhaseSpace {
  kClassical,
  kClassicalWithInternalEnergy,
};

/// Truncated moment basis. Entries are ordered monomials of total order
/// <= N (lexicographic on (order, p, q, r)); the extended phase space
/// appends the energy-weighted entries (xi^2 + 2I/m) * {1, xi_i}.
/// A handful of named non-monomial sets (Euler 5-moment, 13-moment) are
/// provided for the closures and characteristic-speed analyses.
class MomentBasis {
 public:
  MomentBasis() = default;
  MomentBasis(int N, PhaseSpace ps, int dim, std::vector<BasisEntry> entries,
              std::string name)
      : N_(N), phase_space_(ps), dim_(dim), entries_(std::move(entries)),
        name_(std::move(name)) {}

  int truncation_order() const noexcept { return N_; }
  PhaseSpace phase_space() const noexcept { return phase_space_; }
  /// Velocity-space dimension (3, or 1 for the reduced probe space).
  int dim() const noexcept { return dim_; }
  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const BasisEntry& entry(std::size_t a) const { return entries_[a]; }
  const std::vector<BasisEntry>& entries() const noexcept { return entries_; }

  bool has_internal_energy() const noexcept {
    return phase_space_ == PhaseSpace::kClassicalWithInternalEnergy;
  }

  /// Multi-indices of the monomial entries, in basis order.
  std::vector<MultiIndex> indices() const {
    std::vector<MultiIndex> out;
    for (const auto& entry : entries_)
      if (entry.size() == 1 && entry[0].e == 0 && entry[0].coef == 1.0)
        out.push_back(entry[0].idx);
    return out;
  }

  /// Position of the monomial (p, q, r), if present.
  std::optional<std::size_t> find(int p, int q, int r) const {
    for (std::size_t a = 0; a < entries_.size(); ++a) {
      const auto& entry = entries_[a];
      if (entry.size() == 1 && entry[0].e == 0 && entry[0].coef == 1.0 &&
          entry[0].idx == MultiIndex{p, q, r})
        return a;
    }
    return std::nullopt;
  }

  /// Largest velocity degree over all entries.
  int max_velocity_degree() const {
    int d = 0;
    for (const auto& entry : entries_) d = std::max(d, entry_velocity_degree(entry));
    return d;
  }

 private:
  int N_ = 0;
  PhaseSpace phase_space_ = PhaseSpace::kClassical;
  int dim_ = 3;
  std::vector<BasisEntry> entries_;
  std::string name_;
};

namespace detail {

inline std::vector<MultiIndex> monomials_up_to(int N, int dim) {
  std::vector<MultiIndex> idx;
  if (dim == 1) {
    for (int p = 0; p <= N; ++p) idx.push_back({p, 0, 0});
  } else {
    for (int p = 0; p <= N; ++p)
      for (int q = 0; q + p <= N; ++q)
        for (int r = 0; r + q + p <= N; ++r) idx.push_back({p, q, r});
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace detail

/// Full monomial basis of all velocity monomials with order <= N. The
/// extended phase space appends (xi^2 + 2I/m) and (xi^2 + 2I/m) xi_i.
inline MomentBasis build_basis(int N, PhaseSpace phase_space = PhaseSpace::kClassical) {
  if (N < 0) throw DomainError("build_basis: N must be >= 0");
  std::vector<BasisEntry> entries;
  for (const auto& mi : detail::monomials_up_to(N, 3))
    entries.push_back(monomial_entry(mi.p, mi.q, mi.r));
  if (phase_space == PhaseSpace::kClassicalWithInternalEnergy) {
    entries.push_back({BasisTerm{1.0, {0, 0, 0}, 1}});
    entries.push_back({BasisTerm{1.0, {1, 0, 0}, 1}});
    entries.push_back({BasisTerm{1.0, {0, 1, 0}, 1}});
    entries.push_back({BasisTerm{1.0, {0, 0, 1}, 1}});
  }
  return MomentBasis(N, phase_space, 3, std::move(entries), "monomial");
}

/// One-dimensional reduction: monomials 1, xi, ..., xi^N of a single
/// velocity coordinate.
inline MomentBasis build_basis_1d(int N) {
  if (N < 0) throw DomainError("build_basis_1d: N must be >= 0");
  std::vector<BasisEntry> entries;
  for (const auto& mi : detail::monomials_up_to(N, 1))
    entries.push_back(monomial_entry(mi.p, mi.q, mi.r));
  return MomentBasis(N, PhaseSpace::kClassical, 1, std::move(entries), "monomial_1d");
}

/// Five-moment conservation-law set {1, xi_i, xi^2} (densities of mass,
/// momentum and twice the energy).
inline MomentBasis euler_basis() {
  std::vector<BasisEntry> entries;
  entries.push_back(monomial_entry(0, 0, 0));
  entries.push_back(monomial_entry(1, 0, 0));
  entries.push_back(monomial_entry(0, 1, 0));
  entries.push_back(monomial_entry(0, 0, 1));
  entries.push_back({BasisTerm{1.0, {2, 0, 0}, 0}, BasisTerm{1.0, {0, 2, 0}, 0},
                     BasisTerm{1.0, {0, 0, 2}, 0}});
  return MomentBasis(1, PhaseSpace::kClassical, 3, std::move(entries), "euler5");
}

/// Thirteen-moment set {1, xi_i, xi_i xi_j, xi^2 xi_i}: the monomials of
/// order <= 2 plus the contracted energy-flux triplet.
inline MomentBasis thirteen_moment_basis() {
  std::vector<BasisEntry> entries;
  for (const auto& mi : detail::monomials_up_to(2, 3))
    entries.push_back(monomial_entry(mi.p, mi.q, mi.r));
  auto contracted = [](int axis) {
    BasisEntry e;
    for (int i = 0; i < 3; ++i) {
      MultiIndex mi{};
      int* comp[3] = {&mi.p, &mi.q, &mi.r};
      *comp[i] += 2;
      *comp[axis] += 1;
      e.push_back(BasisTerm{1.0, mi, 0});
    }
    return e;
  };
  entries.push_back(contracted(0));
  entries.push_back(contracted(1));
  entries.push_back(contracted(2));
  return MomentBasis(3, PhaseSpace::kClassical, 3, std::move(entries), "thirteen");
}

/// Six-moment polyatomic set {1, xi_i, xi^2, xi^2 + 2I/m}.
inline MomentBasis six_moment_basis() {
  std::vector<BasisEntry> entries;
  entries.push_back(monomial_entry(0, 0, 0));
  entries.push_back(monomial_entry(1, 0, 0));
  entries.push_back(monomial_entry(0, 1, 0));
  entries.push_back(monomial_entry(0, 0, 1));
  entries.push_back({BasisTerm{1.0, {2, 0, 0}, 0}, BasisTerm{1.0, {0, 2, 0}, 0},
                     BasisTerm{1.0, {0, 0, 2}, 0}});
  entries.push_back({BasisTerm{1.0, {0, 0, 0}, 1}});
  return MomentBasis(2, PhaseSpace::kClassicalWithInternalEnergy, 3, std::move(entries),
                     "six_moment");
}

/// Component count of the full classical basis: (N+1)(N+2)(N+3)/6.
inline std::size_t classical_basis_size(int N) {
  return static_cast<std::size_t>((N + 1) * (N + 2) * (N + 3) / 6);
}

/// Vector of moment densities addressed by basis position.
struct MomentVector {
  const MomentBasis* basis = nullptr;
  std::vector<double> values;

  MomentVector() = default;
  explicit MomentVector(const MomentBasis& b) : basis(&b), values(b.size(), 0.0) {}
  MomentVector(const MomentBasis& b, std::vector<double> v)
      : basis(&b), values(std::move(v)) {}

  double& operator[](std::size_t a) { return values[a]; }
  double operator[](std::size_t a) const { return values[a]; }
  std::size_t size() const { return values.size(); }
};

/// Lagrange multipliers, dual to MomentVector entry by entry.
struct MultiplierVector {
  const MomentBasis* basis = nullptr;
  std::vector<double> values;

  MultiplierVector() = default;
  explicit MultiplierVector(const MomentBasis& b) : basis(&b), values(b.size(), 0.0) {}
  MultiplierVector(const MomentBasis& b, std::vector<double> v)
      : basis(&b), values(std::move(v)) {}

  double& operator[](std::size_t a) { return values[a]; }
  double operator[](std::size_t a) const { return values[a]; }
  std::size_t size() const { return values.size(); }
};

}  // namespace maxent
