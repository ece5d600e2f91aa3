#pragma once

#include <span>
#include <vector>

#include "trafeq/equilibrium.hpp"
#include "trafeq/network.hpp"

namespace trafeq {

enum class StepRule { Harmonic, ExactLineSearch };

struct FwOptions {
  double eps_rel = 0.01;
  StepRule rule = StepRule::ExactLineSearch;
  int max_iters = 100000;
  double abs_target = 0.0;  // if > 0, also require fw_gap <= abs_target
  double time_limit_s = 0.0;
  int threads = 1;
};

struct FwRecord {
  int iteration = 0;
  double elapsed_s = 0.0;
  double objective = 0.0;
  double fw_gap = 0.0;
  double rel_gap = 0.0;
  double step = 0.0;
};

struct FwState {
  std::vector<double> flows;
  int k = 0;
  double fw_gap = 0.0;
  double fw_gap0 = 0.0;
  double objective = 0.0;
  bool converged = false;
  std::vector<FwRecord> history;
};

/// Σ_e σ_e(f_e).
double beckmann_objective(const Network& net, std::span<const double> flows);

/// Every OD demand on a current shortest path.
std::vector<double> aon_assignment(const Network& net, const DemandMatrix& dm,
                                   std::span<const double> t, int threads = 1);

/// Conditional gradient for the deterministic Beckmann model, started from
/// the all-or-nothing assignment at free-flow times.
FwState fw_run(const Network& net, const DemandMatrix& dm,
               const FwOptions& options);

struct CompareResult {
  EquilibriumSolution umst;
  FwState fw;
  double umst_objective = 0.0;
  double fw_objective = 0.0;
  double tolerance = 0.0;  // 2 ε̃ gap₀
  bool agree = false;
};

/// Solves deterministic Beckmann with both methods to the same relative
/// accuracy. Frank–Wolfe is additionally held to ε̃ gap₀ of the dual run so
/// both objectives carry certificates of the same absolute size.
CompareResult compare_solvers(const Network& net, const DemandMatrix& dm,
                              const ModelSpec& spec,
                              StepRule rule = StepRule::ExactLineSearch);

}  // namespace trafeq
