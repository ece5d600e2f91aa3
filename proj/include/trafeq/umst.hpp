#pragma once

#include <span>
#include <vector>

#include "trafeq/link_cost.hpp"
#include "trafeq/network.hpp"
#include "trafeq/oracle.hpp"

namespace trafeq {

/// Separable composite h(t) = Σ_e σ*_e(t_e) restricted to Q = {t >= t̄}.
class Composite {
 public:
  Composite(CostModel model, std::vector<Edge> edges);
  Composite(CostModel model, const Network& net);

  /// h = 0 on Q = {t >= lower}; lower may be any finite vector.
  static Composite bound_only(std::span<const double> lower);

  CostModel model() const { return model_; }
  size_t size() const { return edges_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const Edge& edge(size_t e) const { return edges_[e]; }

  double value(std::span<const double> t) const;

 private:
  CostModel model_;
  std::vector<Edge> edges_;
  std::vector<double> lower_;
};

/// argmin over t >= t̄ of ½‖t − t̄‖² + ⟨G, t⟩ + A h(t), coordinatewise.
std::vector<double> prox_argmin(std::span<const double> G, double A,
                                const Composite& composite);

struct UmstOptions {
  double L0 = 1.0;
  int max_doublings = 64;
};

/// Quantities of the last accepted line-search trial, kept so callers can
/// re-check the descent inequality.
struct AcceptedStep {
  double L = 0.0;
  double alpha = 0.0;
  double A = 0.0;
  double phi_y = 0.0;
  double phi_t = 0.0;
  double linear_term = 0.0;     // ⟨∇Φ(y), t − y⟩
  double distance_sq = 0.0;     // ‖t − y‖²
  double eps_term = 0.0;        // α/(2A) ε
  int doublings = 0;
};

struct UmstState {
  int k = 0;
  double A = 0.0;
  double L = 0.0;
  std::vector<double> t, u, y;
  double phi_t = 0.0;  // Φ(t^k)

  std::vector<double> G;            // Σ α_m ∇Φ(y^m)
  std::vector<double> flow_accum;   // Σ α_m f^m
  // Σ α_m (−⟨f^m, y^m⟩ − Φ(y^m)); its negative is also the constant part
  // of the accumulated linear model.
  double entropy_accum = 0.0;

  double eps_inner = 0.0;
  long value_calls = 0;
  long gradient_calls = 0;
  long line_search_trials = 0;
  AcceptedStep last;
};

/// Iteration 0: y⁰ = t̄, doubling L from options.L0 until the inexact
/// descent condition holds. Throws NumericalError past the doubling cap.
UmstState umst_init(const DualOracle& oracle, const Composite& composite,
                    const UmstOptions& options, double eps_inner);

/// One accelerated step with backtracking on L (halved first).
void umst_step(UmstState& state, const DualOracle& oracle,
               const Composite& composite, const UmstOptions& options);

struct PrimalAverage {
  std::vector<double> flows;
  double entropy = 0.0;  // weighted mean of −⟨f, y⟩ − Φ(y)
};

PrimalAverage averaged_primal(const UmstState& state);

/// min over Q of ½‖t − t̄‖² + Σ α_k [Φ(y^k) + ⟨∇Φ(y^k), t − y^k⟩ + h(t)],
/// evaluated at the model minimizer u^k.
double model_minimum(const UmstState& state, const Composite& composite);

}  // namespace trafeq
