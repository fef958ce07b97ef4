#pragma once

#include <cmath>

#include "maxent/errors.hpp"
#include "maxent/gas_model.hpp"

namespace maxent {

/// Partition function F(chi) of the maximizing distribution
///   f = F'(chi) = Y / (exp(m chi / kB) + s),
/// normalized so F -> 0 as chi -> +inf. F'' < 0 wherever defined; for
/// Fermi statistics F' < Y (Pauli bound); the Bose branch requires
/// exp(m chi / kB) > 1 and is kept away from the singular surface by
/// `bose_margin`.
class PartitionFunction {
 public:
  explicit PartitionFunction(const GasModel& gas, double bose_margin = 1e-8)
      : Y_(gas.Y), beta_(gas.beta()), s_(gas.s()), margin_(bose_margin) {}

  int statistics() const noexcept { return s_; }
  double beta() const noexcept { return beta_; }
  /// Smallest admissible beta*chi on the Bose branch.
  double bose_floor() const noexcept { return margin_; }

  bool in_domain(double chi) const noexcept {
    return s_ >= 0 || beta_ * chi >= margin_;
  }

  /// F(chi), the antiderivative of the occupation value.
  double F(double chi) const {
    const double x = beta_ * chi;
    switch (s_) {
      case 0:
        return -(Y_ / beta_) * std::exp(-x);
      case 1:
        // -(Y/beta) ln(1 + e^{-x}), stable for both signs of x.
        return -(Y_ / beta_) * (std::max(-x, 0.0) + std::log1p(std::exp(-std::abs(x))));
      default:
        check_domain(x);
        return (Y_ / beta_) * std::log(-std::expm1(-x));
    }
  }

  /// F'(chi) = f, the occupation value itself.
  double Fp(double chi) const {
    const double x = beta_ * chi;
    switch (s_) {
      case 0:
        return Y_ * std::exp(-x);
      case 1:
        return x >= 0.0 ? Y_ * std::exp(-x) / (1.0 + std::exp(-x))
                        : Y_ / (std::exp(x) + 1.0);
      default:
        check_domain(x);
        return Y_ / std::expm1(x);
    }
  }

  /// F''(chi) = -beta F' (1 - s F'/Y), strictly negative.
  double Fpp(double chi) const {
    const double fp = Fp(chi);
    return -beta_ * fp * (1.0 - s_ * fp / Y_);
  }

 private:
  void check_domain(double x) const {
    if (!(x >= margin_))
      throw DomainError("Bose partition function evaluated outside exp(m chi/kB) > 1");
  }

  double Y_;
  double beta_;
  int s_;
  double margin_;
};

inline PartitionFunction partition_function(const GasModel& gas) {
  gas.validate();
  return PartitionFunction(gas);
}

}  // namespace maxent
