#include "trafeq/char_fn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "trafeq/error.hpp"

namespace trafeq {

double log_add(double x, double y, double gamma) {
  if (x == kNegInf) return y;
  if (y == kNegInf) return x;
  const double m = std::max(x, y);
  return m + gamma * std::log1p(std::exp(-std::abs(x - y) / gamma));
}

PsiTables char_fn_forward(const Network& net, std::span<const double> t,
                          double gamma, int walk_cap, NodeId source) {
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (walk_cap < 1) throw InvalidArgument("walk cap must be >= 1");
  const size_t V = static_cast<size_t>(net.node_count());
  PsiTables tab;
  tab.source = source;
  tab.walk_cap = walk_cap;
  tab.gamma = gamma;
  tab.node_count = net.node_count();
  tab.a.assign((static_cast<size_t>(walk_cap) + 1) * V, kNegInf);
  tab.b.assign((static_cast<size_t>(walk_cap) + 1) * V, kNegInf);
  tab.a[static_cast<size_t>(source)] = 0.0;

  for (int l = 1; l <= walk_cap; ++l) {
    const double* prev = tab.a.data() + static_cast<size_t>(l - 1) * V;
    double* cur = tab.a.data() + static_cast<size_t>(l) * V;
    const double* bprev = tab.b.data() + static_cast<size_t>(l - 1) * V;
    double* bcur = tab.b.data() + static_cast<size_t>(l) * V;
    for (size_t j = 0; j < V; ++j) {
      const auto& in = net.in_edges(static_cast<NodeId>(j));
      double m = kNegInf;
      for (EdgeId e : in) {
        const double x = prev[net.edge(e).tail] - t[static_cast<size_t>(e)];
        m = std::max(m, x);
      }
      if (m != kNegInf) {
        double s = 0.0;
        for (EdgeId e : in) {
          const double x = prev[net.edge(e).tail] - t[static_cast<size_t>(e)];
          if (x != kNegInf) s += std::exp((x - m) / gamma);
        }
        cur[j] = m + gamma * std::log(s);
      }
      bcur[j] = log_add(bprev[j], cur[j], gamma);
    }
  }
  return tab;
}

namespace {

[[noreturn]] void throw_unreachable(NodeId origin, NodeId dest) {
  throw UnreachableError(
      "no walk within the walk cap from node " +
      std::to_string(Network::external_id(origin)) + " to node " +
      std::to_string(Network::external_id(dest)));
}

double source_value(const PsiTables& tab, const OriginDemand& od) {
  double v = 0.0;
  for (const auto& d : od.destinations) {
    const double bj = tab.b_at(tab.walk_cap, d.node);
    if (bj == kNegInf) throw_unreachable(od.origin, d.node);
    v += d.demand * bj;
  }
  return v;
}

// Reverse sweep over the recursion for one source. Adds the source's edge
// flows (−∂Φ/∂t) into `flows`. Every weight below is exp(x − lse) with
// x <= lse, i.e. a ratio with unit numerator after max-shifting.
void source_backward(const Network& net, std::span<const double> t,
                     const PsiTables& tab, const OriginDemand& od,
                     std::vector<double>& flows) {
  const size_t V = static_cast<size_t>(tab.node_count);
  const double gamma = tab.gamma;
  std::vector<double> bbar(V, 0.0);
  std::vector<double> abar(V, 0.0);       // adjoint of a(l, ·)
  std::vector<double> abar_prev(V, 0.0);  // adjoint of a(l − 1, ·)
  for (const auto& d : od.destinations) bbar[static_cast<size_t>(d.node)] = d.demand;

  for (int l = tab.walk_cap; l >= 1; --l) {
    const double* a_cur = tab.a.data() + static_cast<size_t>(l) * V;
    const double* a_prev = tab.a.data() + static_cast<size_t>(l - 1) * V;
    const double* b_cur = tab.b.data() + static_cast<size_t>(l) * V;
    const double* b_prev = tab.b.data() + static_cast<size_t>(l - 1) * V;

    // b(l) = lse(b(l − 1), a(l)).
    for (size_t j = 0; j < V; ++j) {
      if (bbar[j] == 0.0) continue;
      if (b_cur[j] == kNegInf) {
        bbar[j] = 0.0;
        continue;
      }
      const double wa =
          a_cur[j] == kNegInf ? 0.0 : std::exp((a_cur[j] - b_cur[j]) / gamma);
      const double wb =
          b_prev[j] == kNegInf ? 0.0 : std::exp((b_prev[j] - b_cur[j]) / gamma);
      abar[j] += bbar[j] * wa;
      bbar[j] *= wb;
    }

    // a(l, j) = lse over in-edges k -> j of a(l − 1, k) − t_e.
    std::fill(abar_prev.begin(), abar_prev.end(), 0.0);
    for (size_t j = 0; j < V; ++j) {
      if (abar[j] == 0.0 || a_cur[j] == kNegInf) continue;
      for (EdgeId e : net.in_edges(static_cast<NodeId>(j))) {
        const NodeId k = net.edge(e).tail;
        const double x = a_prev[k] - t[static_cast<size_t>(e)];
        if (x == kNegInf) continue;
        const double share = abar[j] * std::exp((x - a_cur[j]) / gamma);
        abar_prev[static_cast<size_t>(k)] += share;
        flows[static_cast<size_t>(e)] += share;
      }
    }
    abar.swap(abar_prev);
  }
}

void check_times(const Network& net, std::span<const double> t) {
  if (t.size() != static_cast<size_t>(net.edge_count()))
    throw InvalidArgument("time vector length does not match edge count");
}

}  // namespace

double char_fn_value(const Network& net, std::span<const double> t,
                     double gamma, int walk_cap, const DemandMatrix& dm,
                     int threads) {
  check_times(net, t);
  const auto& origins = dm.origins();
  std::vector<double> parts(origins.size(), 0.0);
  detail::parallel_for(static_cast<int>(origins.size()), threads, [&](int i) {
    const auto& od = origins[static_cast<size_t>(i)];
    const PsiTables tab = char_fn_forward(net, t, gamma, walk_cap, od.origin);
    parts[static_cast<size_t>(i)] = source_value(tab, od);
  });
  double v = 0.0;
  for (double p : parts) v += p;
  return v;
}

OracleResult char_fn_gradient(const Network& net, std::span<const double> t,
                              double gamma, int walk_cap,
                              const DemandMatrix& dm, int threads) {
  check_times(net, t);
  const auto& origins = dm.origins();
  const size_t n = static_cast<size_t>(net.edge_count());
  std::vector<double> parts(origins.size(), 0.0);
  std::vector<std::vector<double>> part_flows(origins.size());
  detail::parallel_for(static_cast<int>(origins.size()), threads, [&](int i) {
    const auto& od = origins[static_cast<size_t>(i)];
    const PsiTables tab = char_fn_forward(net, t, gamma, walk_cap, od.origin);
    parts[static_cast<size_t>(i)] = source_value(tab, od);
    auto& fl = part_flows[static_cast<size_t>(i)];
    fl.assign(n, 0.0);
    source_backward(net, t, tab, od, fl);
  });
  // Fixed-order reduction keeps results independent of the thread count.
  OracleResult out;
  out.flows.assign(n, 0.0);
  for (size_t i = 0; i < origins.size(); ++i) {
    out.value += parts[i];
    for (size_t e = 0; e < n; ++e) out.flows[e] += part_flows[i][e];
  }
  out.grad.resize(n);
  for (size_t e = 0; e < n; ++e) out.grad[e] = -out.flows[e];
  return out;
}

CharFnOracle::CharFnOracle(const Network& net, const DemandMatrix& dm,
                           double gamma, int walk_cap, int threads)
    : net_(net), dm_(dm), gamma_(gamma), walk_cap_(walk_cap), threads_(threads) {
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (walk_cap < 1) throw InvalidArgument("walk cap must be >= 1");
}

double CharFnOracle::value(std::span<const double> t) const {
  return char_fn_value(net_, t, gamma_, walk_cap_, dm_, threads_);
}

OracleResult CharFnOracle::evaluate(std::span<const double> t) const {
  return char_fn_gradient(net_, t, gamma_, walk_cap_, dm_, threads_);
}

}  // namespace trafeq
