#include "trafeq/frank_wolfe.hpp"

#include <chrono>
#include <cmath>

#include "trafeq/error.hpp"
#include "trafeq/link_cost.hpp"
#include "trafeq/shortest.hpp"

namespace trafeq {

namespace {

constexpr int kLineSearchIterations = 100;

double travel_time_slope(const Edge& e, double flow) {
  if (flow <= 0.0 || e.rho == 0.0) return 0.0;
  return e.free_flow_time * e.rho * e.power *
         std::pow(flow / e.capacity, e.power - 1.0) / e.capacity;
}

// Minimizes Σσ(f + s d) over s in [0, 1]. The derivative
// Σ τ_e(f_e + s d_e) d_e is nondecreasing in s.
double exact_step(const Network& net, std::span<const double> f,
                  std::span<const double> d) {
  auto slope = [&](double s, double* curvature) {
    double g = 0.0, h = 0.0;
    for (EdgeId e = 0; e < net.edge_count(); ++e) {
      const size_t i = static_cast<size_t>(e);
      if (d[i] == 0.0) continue;
      const double x = std::max(0.0, f[i] + s * d[i]);
      g += travel_time(net.edge(e), x) * d[i];
      h += travel_time_slope(net.edge(e), x) * d[i] * d[i];
    }
    if (curvature) *curvature = h;
    return g;
  };
  if (slope(0.0, nullptr) >= 0.0) return 0.0;
  if (slope(1.0, nullptr) <= 0.0) return 1.0;
  double lo = 0.0, hi = 1.0, s = 0.5;
  for (int it = 0; it < kLineSearchIterations; ++it) {
    double h = 0.0;
    const double g = slope(s, &h);
    if (g == 0.0) return s;
    if (g > 0.0)
      hi = s;
    else
      lo = s;
    if (hi - lo <= 1e-15) break;
    double next = h > 0.0 ? s - g / h : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-15) return next;
    s = next;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double beckmann_objective(const Network& net, std::span<const double> flows) {
  double s = 0.0;
  for (EdgeId e = 0; e < net.edge_count(); ++e)
    s += sigma(net.edge(e), flows[static_cast<size_t>(e)]);
  return s;
}

std::vector<double> aon_assignment(const Network& net, const DemandMatrix& dm,
                                   std::span<const double> t, int threads) {
  return det_oracle(net, t, dm, threads).flows;
}

FwState fw_run(const Network& net, const DemandMatrix& dm,
               const FwOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - started).count();
  };
  if (!(options.eps_rel > 0.0 && options.eps_rel < 1.0))
    throw InvalidArgument("relative accuracy must lie in (0, 1)");
  dm.check_against(net);

  const size_t n = static_cast<size_t>(net.edge_count());
  const int threads = std::max(1, options.threads);
  FwState st;
  st.flows = aon_assignment(net, dm, net.free_flow_times(), threads);
  std::vector<double> times(n), dir(n);
  for (;;) {
    for (EdgeId e = 0; e < net.edge_count(); ++e)
      times[static_cast<size_t>(e)] =
          travel_time(net.edge(e), st.flows[static_cast<size_t>(e)]);
    const std::vector<double> target = aon_assignment(net, dm, times, threads);
    double gap = 0.0;
    for (size_t e = 0; e < n; ++e) {
      dir[e] = target[e] - st.flows[e];
      gap -= times[e] * dir[e];
    }
    st.fw_gap = gap;
    if (st.k == 0) st.fw_gap0 = gap;
    st.objective = beckmann_objective(net, st.flows);

    FwRecord rec;
    rec.iteration = st.k;
    rec.elapsed_s = elapsed();
    rec.objective = st.objective;
    rec.fw_gap = gap;
    rec.rel_gap = st.fw_gap0 > 0.0 ? gap / st.fw_gap0 : 0.0;

    double stop_at = options.eps_rel * st.fw_gap0;
    if (options.abs_target > 0.0) stop_at = std::min(stop_at, options.abs_target);
    if (gap <= stop_at) {
      st.converged = true;
      st.history.push_back(rec);
      break;
    }
    if (st.k >= options.max_iters ||
        (options.time_limit_s > 0.0 && elapsed() >= options.time_limit_s)) {
      st.history.push_back(rec);
      break;
    }
    const double s = options.rule == StepRule::Harmonic
                         ? 2.0 / (st.k + 2.0)
                         : exact_step(net, st.flows, dir);
    rec.step = s;
    st.history.push_back(rec);
    for (size_t e = 0; e < n; ++e)
      st.flows[e] = std::max(0.0, st.flows[e] + s * dir[e]);
    ++st.k;
  }
  return st;
}

CompareResult compare_solvers(const Network& net, const DemandMatrix& dm,
                              const ModelSpec& spec, StepRule rule) {
  if (spec.cost != CostModel::Beckmann ||
      spec.gamma_mode != GammaMode::Explicit || spec.gamma != 0.0)
    throw InvalidArgument("comparison requires Beckmann with gamma = 0");
  CompareResult out;
  out.umst = solve(net, dm, spec);
  FwOptions fw;
  fw.eps_rel = spec.eps_rel;
  fw.rule = rule;
  fw.max_iters = spec.max_iters;
  fw.time_limit_s = spec.time_limit_s;
  fw.threads = spec.threads;
  fw.abs_target = spec.eps_rel * out.umst.gap0;
  out.fw = fw_run(net, dm, fw);
  out.umst_objective = out.umst.primal_objective;
  out.fw_objective = out.fw.objective;
  out.tolerance = 2.0 * spec.eps_rel * out.umst.gap0;
  out.agree = std::abs(out.umst_objective - out.fw_objective) <= out.tolerance;
  return out;
}

}  // namespace trafeq
