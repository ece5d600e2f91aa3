#pragma once

#include <span>
#include <vector>

namespace trafeq {

/// Dual objective information at one point: Φ(y), ∇Φ(y), and the induced
/// edge flows f(y) = −∇Φ(y).
struct OracleResult {
  double value = 0.0;
  std::vector<double> grad;
  std::vector<double> flows;
};

/// Smooth or nonsmooth convex function Φ of the edge-time vector.
class DualOracle {
 public:
  virtual ~DualOracle() = default;
  virtual double value(std::span<const double> t) const = 0;
  virtual OracleResult evaluate(std::span<const double> t) const = 0;
};

}  // namespace trafeq
