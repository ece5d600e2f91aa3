#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "trafeq/link_cost.hpp"
#include "trafeq/network.hpp"
#include "trafeq/umst.hpp"

namespace trafeq {

enum class GammaMode { Explicit, Auto };

struct ConvergenceRecord;

struct ModelSpec {
  CostModel cost = CostModel::Beckmann;  // Beckmann or StableDynamics
  double gamma = 0.0;                    // 0 selects the deterministic limit
  GammaMode gamma_mode = GammaMode::Explicit;
  int walk_cap = 0;                      // 0: |V| − 1
  double eps_rel = 0.01;
  int max_iters = 100000;
  double time_limit_s = 0.0;             // 0: unlimited
  int threads = 1;
  double r_hat = 0.0;                    // stable dynamics penalty radius; 0: auto
  double path_count_log = 0.0;           // ln|P_w| bound for auto γ; 0: H ln(max out-degree)
  double L0 = 1.0;
  // Every record is passed here as it is produced. With keep_history off
  // only the first and last records are stored, which bounds memory on very
  // long runs.
  std::function<void(const ConvergenceRecord&)> on_record;
  bool keep_history = true;
};

struct ConvergenceRecord {
  int iteration = 0;
  double elapsed_s = 0.0;
  double A = 0.0;
  double L = 0.0;
  double gap = 0.0;
  double rel_gap = 0.0;
  double violation = 0.0;
  double gap_unpenalized = 0.0;  // stable dynamics gap without the 3R̂ term
  double r_tilde = 0.0;
  double dual_value = 0.0;
  long value_calls = 0;
  long gradient_calls = 0;
};

struct EquilibriumSolution {
  std::vector<double> times;  // t^N
  std::vector<double> flows;  // averaged primal flows
  double gap = 0.0;
  double gap0 = 0.0;
  double violation = 0.0;
  double gap_unpenalized = 0.0;
  double primal_objective = 0.0;
  double dual_value = 0.0;
  double gamma = 0.0;
  int walk_cap = 0;
  int iterations = 0;
  bool converged = false;
  long value_calls = 0;
  long gradient_calls = 0;
  long line_search_trials = 0;
  ModelSpec spec;
  std::vector<ConvergenceRecord> history;
};

/// Certificate pieces computed at one point (t^N, averaged primal).
struct GapReport {
  double gap = 0.0;
  double violation = 0.0;
  double gap_unpenalized = 0.0;
  double primal = 0.0;  // primal objective at the averaged flows
  double dual = 0.0;    // Φ(t) + h(t)
};

/// [Φ(t) + Σσ*(t)] + [Σσ(f̄) + entropy]; entropy is dropped when γ = 0.
GapReport gap_beckmann(const Network& net, std::span<const double> t,
                       double phi_t, const PrimalAverage& avg, double gamma);
GapReport gap_beckmann(const Network& net, const UmstState& state,
                       double gamma);

/// Φ(t) + ⟨cap, t − t̄⟩ + ⟨f̄, t̄⟩ + entropy + 3 R̂ ‖(f̄ − cap)₊‖₂.
GapReport gap_stable_dynamics(const Network& net, std::span<const double> t,
                              double phi_t, const PrimalAverage& avg,
                              double gamma, double r_hat);
GapReport gap_stable_dynamics(const Network& net, const UmstState& state,
                              double gamma, double r_hat);

/// ‖(flows − cap)₊‖₂.
double capacity_violation(const Network& net, std::span<const double> flows);

/// ‖t − t̄‖₂ / √2, the computable stand-in for the unknown solution radius.
double r_hat_estimate(const Network& net, std::span<const double> t);

/// ε / (2 Σ_w d_w ln|P_w|) with one ln|P_w| bound for every pair.
double gamma_star(double eps_abs, const DemandMatrix& dm,
                  double path_count_log);
/// Same with a per-pair bound, in DemandMatrix iteration order.
double gamma_star(double eps_abs, const DemandMatrix& dm,
                  std::span<const double> path_count_log);

/// sqrt(½ Σ_e (τ_e(f_e) − t̄_e)²).
double r_tilde(const Network& net, std::span<const double> flows);

int resolve_walk_cap(const Network& net, int walk_cap);

/// Runs the accelerated dual method to a certified relative gap.
/// Throws UnreachableError, InvalidArgument or NumericalError.
EquilibriumSolution solve(const Network& net, const DemandMatrix& dm,
                          const ModelSpec& spec);

const char* to_string(CostModel model);

}  // namespace trafeq
