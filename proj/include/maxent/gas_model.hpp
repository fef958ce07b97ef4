#pragma once

#include <optional>

#include "maxent/errors.hpp"

namespace maxent {

/// Particle statistics selector. The sign enters the occupation
/// denominator 1/(exp(m chi / kB) + s).
enum class Statistics : int {
  kBose = -1,
  kNonDegenerate = 0,
  kFermi = +1,
};

/// Gas description shared by the classical modules. Defaults give the
/// nondimensional internal unit system m = kB = 1, Y = 1. The optional
/// `phi_exponent` a selects the internal-energy state density
/// phi(I) = I^a used by the extended phase space (a > -1 required for
/// integrability of the equilibrium internal-mode marginal).
struct GasModel {
  Statistics statistics = Statistics::kNonDegenerate;
  double Y = 1.0;   // phase-space density constant
  double m = 1.0;   // particle mass
  double kB = 1.0;  // Boltzmann constant
  std::optional<double> phi_exponent{};

  int s() const noexcept { return static_cast<int>(statistics); }
  /// m/kB, the factor multiplying chi inside the exponential.
  double beta() const noexcept { return m / kB; }

  void validate() const {
    if (!(Y > 0.0)) throw DegenerateState("GasModel: Y must be positive");
    if (!(m > 0.0)) throw DegenerateState("GasModel: m must be positive");
    if (!(kB > 0.0)) throw DegenerateState("GasModel: kB must be positive");
    if (phi_exponent && !(*phi_exponent > -1.0))
      throw DegenerateState("GasModel: phi_exponent must be > -1");
  }
};

inline GasModel monatomic_gas(Statistics s = Statistics::kNonDegenerate) {
  GasModel g;
  g.statistics = s;
  return g;
}

/// Polytropic polyatomic gas with D internal+translational degrees of
/// freedom; phi(I) = I^((D-5)/2) recovers eps_E = (D/2)(kB/m) T.
inline GasModel polyatomic_gas(double D, Statistics s = Statistics::kNonDegenerate) {
  if (!(D > 3.0)) throw DegenerateState("polyatomic_gas: D must exceed 3");
  GasModel g;
  g.statistics = s;
  g.phi_exponent = 0.5 * (D - 5.0);
  return g;
}

}  // namespace maxent
