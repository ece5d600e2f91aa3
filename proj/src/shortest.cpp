#include "trafeq/shortest.hpp"

#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>

#include "parallel.hpp"
#include "trafeq/error.hpp"

namespace trafeq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void throw_unreachable(NodeId origin, NodeId dest) {
  throw UnreachableError("node " + std::to_string(Network::external_id(dest)) +
                         " is unreachable from node " +
                         std::to_string(Network::external_id(origin)));
}

double source_distance_sum(const ShortestTree& tree, const OriginDemand& od) {
  double s = 0.0;
  for (const auto& d : od.destinations) {
    const double dist = tree.dist[static_cast<size_t>(d.node)];
    if (dist == kInf) throw_unreachable(od.origin, d.node);
    s += d.demand * dist;
  }
  return s;
}

}  // namespace

ShortestTree dijkstra(const Network& net, std::span<const double> t,
                      NodeId source) {
  if (t.size() != static_cast<size_t>(net.edge_count()))
    throw InvalidArgument("time vector length does not match edge count");
  const size_t V = static_cast<size_t>(net.node_count());
  for (double te : t)
    if (te < 0.0) throw InvalidArgument("negative edge time");
  ShortestTree tree;
  tree.source = source;
  tree.dist.assign(V, kInf);
  tree.parent_edge.assign(V, kNoEdge);
  tree.settle_order.reserve(V);
  std::vector<char> settled(V, 0);

  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  tree.dist[static_cast<size_t>(source)] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (settled[static_cast<size_t>(v)] || d > tree.dist[static_cast<size_t>(v)])
      continue;
    settled[static_cast<size_t>(v)] = 1;
    tree.settle_order.push_back(v);
    for (EdgeId e : net.out_edges(v)) {
      const NodeId w = net.edge(e).head;
      const double nd = d + t[static_cast<size_t>(e)];
      if (nd < tree.dist[static_cast<size_t>(w)]) {
        tree.dist[static_cast<size_t>(w)] = nd;
        tree.parent_edge[static_cast<size_t>(w)] = e;
        heap.emplace(nd, w);
      }
    }
  }
  return tree;
}

std::vector<double> tree_flows(const Network& net, const ShortestTree& tree,
                               std::span<const Destination> demands) {
  const size_t V = tree.dist.size();
  std::vector<double> through(V, 0.0);  // demand ending in the subtree
  for (const auto& d : demands) {
    if (d.demand <= 0.0) continue;
    if (tree.dist[static_cast<size_t>(d.node)] == kInf)
      throw_unreachable(tree.source, d.node);
    through[static_cast<size_t>(d.node)] += d.demand;
  }
  std::vector<double> flows(static_cast<size_t>(net.edge_count()), 0.0);
  // Reverse settle order visits children before parents.
  for (auto it = tree.settle_order.rbegin(); it != tree.settle_order.rend();
       ++it) {
    const EdgeId e = tree.parent_edge[static_cast<size_t>(*it)];
    if (e == kNoEdge) continue;
    const double w = through[static_cast<size_t>(*it)];
    flows[static_cast<size_t>(e)] = w;
    through[static_cast<size_t>(net.edge(e).tail)] += w;
  }
  return flows;
}

OracleResult det_oracle(const Network& net, std::span<const double> t,
                        const DemandMatrix& dm, int threads) {
  const auto& origins = dm.origins();
  const size_t n = static_cast<size_t>(net.edge_count());
  std::vector<double> parts(origins.size(), 0.0);
  std::vector<std::vector<double>> part_flows(origins.size());
  detail::parallel_for(static_cast<int>(origins.size()), threads, [&](int i) {
    const auto& od = origins[static_cast<size_t>(i)];
    const ShortestTree tree = dijkstra(net, t, od.origin);
    parts[static_cast<size_t>(i)] = source_distance_sum(tree, od);
    part_flows[static_cast<size_t>(i)] =
        tree_flows(net, tree, od.destinations);
  });
  OracleResult out;
  out.flows.assign(n, 0.0);
  for (size_t i = 0; i < origins.size(); ++i) {
    out.value -= parts[i];
    for (size_t e = 0; e < n; ++e) out.flows[e] += part_flows[i][e];
  }
  out.grad.resize(n);
  for (size_t e = 0; e < n; ++e) out.grad[e] = -out.flows[e];
  return out;
}

double ShortestPathOracle::value(std::span<const double> t) const {
  const auto& origins = dm_.origins();
  std::vector<double> parts(origins.size(), 0.0);
  detail::parallel_for(static_cast<int>(origins.size()), threads_, [&](int i) {
    const auto& od = origins[static_cast<size_t>(i)];
    parts[static_cast<size_t>(i)] =
        source_distance_sum(dijkstra(net_, t, od.origin), od);
  });
  double v = 0.0;
  for (double p : parts) v -= p;
  return v;
}

OracleResult ShortestPathOracle::evaluate(std::span<const double> t) const {
  return det_oracle(net_, t, dm_, threads_);
}

}  // namespace trafeq
