#include "trafeq/equilibrium.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <string>

#include "trafeq/char_fn.hpp"
#include "trafeq/error.hpp"
#include "trafeq/shortest.hpp"

namespace trafeq {

namespace {

// Gap checks run every iteration up to this many edges, every
// kSparseGapEvery iterations above it.
constexpr int kDenseGapEdges = 5000;
constexpr int kSparseGapEvery = 5;

// Iteration 0 runs before any gap is known. Its line-search slack is this
// fraction of |Φ(t̄)|, independent of ε̃ so that gap₀ is the same for every
// accuracy target on a given instance.
constexpr double kInitialSlack = 1e-2;

}  // namespace

const char* to_string(CostModel model) {
  switch (model) {
    case CostModel::Beckmann:
      return "beckmann";
    case CostModel::StableDynamics:
      return "stable";
    case CostModel::BoundOnly:
      return "bound-only";
  }
  return "unknown";
}

GapReport gap_beckmann(const Network& net, std::span<const double> t,
                       double phi_t, const PrimalAverage& avg, double gamma) {
  GapReport r;
  double conj = 0.0;
  double primal = 0.0;
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const Edge& edge = net.edge(e);
    conj += sigma_conj(CostModel::Beckmann, edge, t[static_cast<size_t>(e)]);
    primal += sigma(edge, avg.flows[static_cast<size_t>(e)]);
  }
  if (gamma > 0.0) primal += avg.entropy;
  r.dual = phi_t + conj;
  r.primal = primal;
  r.gap = r.dual + r.primal;
  r.gap_unpenalized = r.gap;
  return r;
}

GapReport gap_beckmann(const Network& net, const UmstState& state,
                       double gamma) {
  return gap_beckmann(net, state.t, state.phi_t, averaged_primal(state), gamma);
}

double capacity_violation(const Network& net, std::span<const double> flows) {
  double s = 0.0;
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const double over =
        flows[static_cast<size_t>(e)] - net.edge(e).capacity;
    if (over > 0.0) s += over * over;
  }
  return std::sqrt(s);
}

double r_hat_estimate(const Network& net, std::span<const double> t) {
  double s = 0.0;
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const double d = t[static_cast<size_t>(e)] - net.edge(e).free_flow_time;
    s += d * d;
  }
  return std::sqrt(s) / std::sqrt(2.0);
}

GapReport gap_stable_dynamics(const Network& net, std::span<const double> t,
                              double phi_t, const PrimalAverage& avg,
                              double gamma, double r_hat) {
  GapReport r;
  double priced = 0.0;
  double free_cost = 0.0;
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const Edge& edge = net.edge(e);
    priced += edge.capacity * (t[static_cast<size_t>(e)] - edge.free_flow_time);
    free_cost += avg.flows[static_cast<size_t>(e)] * edge.free_flow_time;
  }
  r.dual = phi_t + priced;
  r.primal = free_cost + (gamma > 0.0 ? avg.entropy : 0.0);
  r.violation = capacity_violation(net, avg.flows);
  r.gap_unpenalized = r.dual + r.primal;
  r.gap = r.gap_unpenalized + 3.0 * r_hat * r.violation;
  return r;
}

GapReport gap_stable_dynamics(const Network& net, const UmstState& state,
                              double gamma, double r_hat) {
  return gap_stable_dynamics(net, state.t, state.phi_t, averaged_primal(state),
                             gamma, r_hat);
}

double gamma_star(double eps_abs, const DemandMatrix& dm,
                  double path_count_log) {
  if (!(eps_abs > 0.0)) throw InvalidArgument("accuracy must be positive");
  const double denom = 2.0 * dm.total() * path_count_log;
  if (!(denom > 0.0))
    throw InvalidArgument("gamma*: zero denominator (no demand or ln|P_w| = 0)");
  return eps_abs / denom;
}

double gamma_star(double eps_abs, const DemandMatrix& dm,
                  std::span<const double> path_count_log) {
  if (!(eps_abs > 0.0)) throw InvalidArgument("accuracy must be positive");
  if (path_count_log.size() != static_cast<size_t>(dm.pair_count()))
    throw InvalidArgument("gamma*: one ln|P_w| bound per pair is required");
  double denom = 0.0;
  size_t i = 0;
  for (const auto& o : dm.origins())
    for (const auto& d : o.destinations) denom += d.demand * path_count_log[i++];
  denom *= 2.0;
  if (!(denom > 0.0)) throw InvalidArgument("gamma*: zero denominator");
  return eps_abs / denom;
}

double r_tilde(const Network& net, std::span<const double> flows) {
  double s = 0.0;
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const Edge& edge = net.edge(e);
    const double d =
        travel_time(edge, flows[static_cast<size_t>(e)]) - edge.free_flow_time;
    s += d * d;
  }
  return std::sqrt(0.5 * s);
}

int resolve_walk_cap(const Network& net, int walk_cap) {
  if (walk_cap > 0) return walk_cap;
  return std::max(1, net.node_count() - 1);
}

EquilibriumSolution solve(const Network& net, const DemandMatrix& dm,
                          const ModelSpec& spec) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - started).count();
  };

  if (spec.cost != CostModel::Beckmann && spec.cost != CostModel::StableDynamics)
    throw InvalidArgument("model must be Beckmann or stable dynamics");
  if (!(spec.eps_rel > 0.0 && spec.eps_rel < 1.0))
    throw InvalidArgument("relative accuracy must lie in (0, 1)");
  if (spec.gamma_mode == GammaMode::Explicit && !(spec.gamma >= 0.0))
    throw InvalidArgument("gamma must be >= 0");
  dm.check_against(net);

  EquilibriumSolution sol;
  sol.spec = spec;
  sol.walk_cap = resolve_walk_cap(net, spec.walk_cap);
  const int threads = std::max(1, spec.threads);

  // Deterministic routes exist iff some walk exists; smoothed routes must
  // also fit within the walk cap.
  const bool needs_cap = spec.gamma_mode == GammaMode::Auto || spec.gamma > 0.0;
  const int reach_cap = needs_cap ? sol.walk_cap : std::max(1, net.node_count() - 1);
  if (auto missing = validate_reachability(net, dm, reach_cap); !missing.empty()) {
    throw UnreachableError(
        std::to_string(missing.size()) + " OD pair(s) unreachable within " +
        std::to_string(reach_cap) + " edges, first: " +
        std::to_string(Network::external_id(missing[0].origin)) + " -> " +
        std::to_string(Network::external_id(missing[0].destination)));
  }

  const std::vector<double> free_times = net.free_flow_times();
  sol.gamma = spec.gamma;
  if (spec.gamma_mode == GammaMode::Auto) {
    // Absolute target: ε̃ times the total free-flow route cost.
    const double scale = -det_oracle(net, free_times, dm, threads).value;
    double log_paths = spec.path_count_log;
    if (!(log_paths > 0.0))
      log_paths = sol.walk_cap * std::log(static_cast<double>(net.max_out_degree()));
    sol.gamma = gamma_star(spec.eps_rel * scale, dm, log_paths);
  }

  std::unique_ptr<DualOracle> oracle;
  if (sol.gamma > 0.0)
    oracle = std::make_unique<CharFnOracle>(net, dm, sol.gamma, sol.walk_cap,
                                            threads);
  else
    oracle = std::make_unique<ShortestPathOracle>(net, dm, threads);
  const Composite composite(spec.cost, net);
  UmstOptions options;
  options.L0 = spec.L0;

  auto certify = [&](const UmstState& state) {
    const PrimalAverage avg = averaged_primal(state);
    if (spec.cost == CostModel::Beckmann)
      return gap_beckmann(net, state.t, state.phi_t, avg, sol.gamma);
    const double r_hat =
        spec.r_hat > 0.0 ? spec.r_hat : r_hat_estimate(net, state.t);
    return gap_stable_dynamics(net, state.t, state.phi_t, avg, sol.gamma, r_hat);
  };
  auto record = [&](const UmstState& state, const GapReport& g) {
    ConvergenceRecord rec;
    rec.iteration = state.k;
    rec.elapsed_s = elapsed();
    rec.A = state.A;
    rec.L = state.L;
    rec.gap = g.gap;
    rec.rel_gap = sol.gap0 > 0.0 ? g.gap / sol.gap0 : 0.0;
    rec.violation = g.violation;
    rec.gap_unpenalized = g.gap_unpenalized;
    rec.r_tilde = r_tilde(net, averaged_primal(state).flows);
    rec.dual_value = g.dual;
    rec.value_calls = state.value_calls;
    rec.gradient_calls = state.gradient_calls;
    if (spec.on_record) spec.on_record(rec);
    if (spec.keep_history || sol.history.size() < 2)
      sol.history.push_back(rec);
    else
      sol.history.back() = rec;
  };

  const double phi_free = oracle->value(free_times);
  UmstState state =
      umst_init(*oracle, composite, options, kInitialSlack * std::abs(phi_free));
  GapReport g = certify(state);
  sol.gap0 = g.gap;
  state.eps_inner = spec.eps_rel * std::max(sol.gap0, 0.0);
  record(state, g);
  const double target = spec.eps_rel * sol.gap0;
  bool converged = g.gap <= target;

  const int every = net.edge_count() <= kDenseGapEdges ? 1 : kSparseGapEvery;
  while (!converged && state.k < spec.max_iters) {
    if (spec.time_limit_s > 0.0 && elapsed() >= spec.time_limit_s) break;
    umst_step(state, *oracle, composite, options);
    const bool last = state.k >= spec.max_iters;
    if (state.k % every != 0 && !last) continue;
    g = certify(state);
    record(state, g);
    converged = g.gap <= target;
  }
  if (sol.history.back().iteration != state.k) {
    g = certify(state);
    record(state, g);
    converged = g.gap <= target;
  }

  const PrimalAverage avg = averaged_primal(state);
  sol.times = state.t;
  sol.flows = avg.flows;
  sol.gap = g.gap;
  sol.violation = g.violation;
  sol.gap_unpenalized = g.gap_unpenalized;
  sol.primal_objective = g.primal;
  sol.dual_value = g.dual;
  sol.iterations = state.k;
  sol.converged = converged;
  sol.value_calls = state.value_calls;
  sol.gradient_calls = state.gradient_calls;
  sol.line_search_trials = state.line_search_trials;
  return sol;
}

}  // namespace trafeq
