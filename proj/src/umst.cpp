#include "trafeq/umst.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <string>

#include "trafeq/error.hpp"

namespace trafeq {

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double dot_diff(std::span<const double> g, std::span<const double> x,
                std::span<const double> y) {
  double s = 0.0;
  for (size_t i = 0; i < g.size(); ++i) s += g[i] * (x[i] - y[i]);
  return s;
}

double dist_sq(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return s;
}

// Floating-point slack for comparing two nearly equal function values; the
// descent test is otherwise exact.
bool descent_holds(double phi_t, double bound) {
  // An overflowed trial point makes both sides infinite; that is a rejection.
  if (!std::isfinite(phi_t) || !std::isfinite(bound)) return false;
  const double slack = 16.0 * std::numeric_limits<double>::epsilon() *
                       std::max(std::abs(phi_t), std::abs(bound));
  return phi_t <= bound + slack;
}

}  // namespace

Composite::Composite(CostModel model, std::vector<Edge> edges)
    : model_(model), edges_(std::move(edges)) {
  lower_.reserve(edges_.size());
  for (const Edge& e : edges_) lower_.push_back(e.free_flow_time);
}

Composite::Composite(CostModel model, const Network& net)
    : Composite(model, net.edges()) {}

Composite Composite::bound_only(std::span<const double> lower) {
  std::vector<Edge> edges(lower.size());
  for (size_t i = 0; i < lower.size(); ++i) edges[i].free_flow_time = lower[i];
  return Composite(CostModel::BoundOnly, std::move(edges));
}

double Composite::value(std::span<const double> t) const {
  if (model_ == CostModel::BoundOnly) return 0.0;
  double s = 0.0;
  for (size_t e = 0; e < edges_.size(); ++e)
    s += sigma_conj(model_, edges_[e], t[e]);
  return s;
}

std::vector<double> prox_argmin(std::span<const double> G, double A,
                                const Composite& composite) {
  std::vector<double> out(composite.size());
  for (size_t e = 0; e < out.size(); ++e)
    out[e] = prox_step(composite.model(), composite.edge(e), G[e], A);
  return out;
}

UmstState umst_init(const DualOracle& oracle, const Composite& composite,
                    const UmstOptions& options, double eps_inner) {
  if (!(options.L0 > 0.0)) throw InvalidArgument("L0 must be positive");
  UmstState s;
  s.eps_inner = eps_inner;
  s.y = composite.lower();
  OracleResult at_y = oracle.evaluate(s.y);
  ++s.gradient_calls;
  ++s.value_calls;

  double L = options.L0;
  std::vector<double> scaled(at_y.grad.size());
  for (int j = 0;; ++j) {
    if (j > options.max_doublings)
      throw NumericalError("line search exceeded the doubling cap at iteration 0");
    const double alpha = 1.0 / L;
    for (size_t e = 0; e < scaled.size(); ++e) scaled[e] = alpha * at_y.grad[e];
    s.t = prox_argmin(scaled, alpha, composite);
    const double phi_t = oracle.value(s.t);
    ++s.value_calls;
    ++s.line_search_trials;

    AcceptedStep trial;
    trial.L = L;
    trial.alpha = alpha;
    trial.A = alpha;
    trial.phi_y = at_y.value;
    trial.phi_t = phi_t;
    trial.linear_term = dot_diff(at_y.grad, s.t, s.y);
    trial.distance_sq = dist_sq(s.t, s.y);
    trial.eps_term = 0.5 * eps_inner;
    trial.doublings = j;
    const double bound = trial.phi_y + trial.linear_term +
                         0.5 * L * trial.distance_sq + trial.eps_term;
    if (descent_holds(phi_t, bound)) {
      s.last = trial;
      s.phi_t = phi_t;
      s.A = alpha;
      s.L = L;
      s.u = s.t;
      s.G = std::move(scaled);
      s.flow_accum = at_y.flows;
      for (double& f : s.flow_accum) f *= alpha;
      const double fy = dot(at_y.flows, s.y);
      s.entropy_accum = alpha * (-fy - at_y.value);
      return s;
    }
    L *= 2.0;
  }
}

void umst_step(UmstState& s, const DualOracle& oracle,
               const Composite& composite, const UmstOptions& options) {
  const size_t n = s.t.size();
  double L = 0.5 * s.L;
  const std::vector<double>& lower = composite.lower();
  std::vector<double> y(n), G(n), t(n);
  for (int j = 0;; ++j) {
    if (j > options.max_doublings)
      throw NumericalError("line search exceeded the doubling cap at iteration " +
                           std::to_string(s.k + 1));
    const double alpha =
        0.5 / L + std::sqrt(0.25 / (L * L) + s.A / L);
    const double A_next = s.A + alpha;
    for (size_t e = 0; e < n; ++e)
      y[e] = std::max(lower[e], (alpha * s.u[e] + s.A * s.t[e]) / A_next);
    OracleResult at_y = oracle.evaluate(y);
    ++s.gradient_calls;
    ++s.value_calls;
    for (size_t e = 0; e < n; ++e) G[e] = s.G[e] + alpha * at_y.grad[e];
    std::vector<double> u = prox_argmin(G, A_next, composite);
    // Rounding in the convex combination can land one ulp below t̄.
    for (size_t e = 0; e < n; ++e)
      t[e] = std::max(lower[e], (alpha * u[e] + s.A * s.t[e]) / A_next);
    const double phi_t = oracle.value(t);
    ++s.value_calls;
    ++s.line_search_trials;

    AcceptedStep trial;
    trial.L = L;
    trial.alpha = alpha;
    trial.A = A_next;
    trial.phi_y = at_y.value;
    trial.phi_t = phi_t;
    trial.linear_term = dot_diff(at_y.grad, t, y);
    trial.distance_sq = dist_sq(t, y);
    trial.eps_term = alpha / (2.0 * A_next) * s.eps_inner;
    trial.doublings = j;
    const double bound = trial.phi_y + trial.linear_term +
                         0.5 * L * trial.distance_sq + trial.eps_term;
    if (descent_holds(phi_t, bound)) {
      s.last = trial;
      s.k += 1;
      s.A = A_next;
      s.L = L;
      s.t.swap(t);
      s.u.swap(u);
      s.y.swap(y);
      s.G.swap(G);
      s.phi_t = phi_t;
      for (size_t e = 0; e < n; ++e) s.flow_accum[e] += alpha * at_y.flows[e];
      const double fy = dot(at_y.flows, s.y);
      s.entropy_accum += alpha * (-fy - at_y.value);
      return;
    }
    L *= 2.0;
  }
}

PrimalAverage averaged_primal(const UmstState& state) {
  PrimalAverage avg;
  avg.flows = state.flow_accum;
  for (double& f : avg.flows) f /= state.A;
  avg.entropy = state.entropy_accum / state.A;
  return avg;
}

double model_minimum(const UmstState& state, const Composite& composite) {
  const auto& lower = composite.lower();
  return 0.5 * dist_sq(state.u, lower) + dot(state.G, state.u) +
         state.A * composite.value(state.u) - state.entropy_accum;
}

}  // namespace trafeq
