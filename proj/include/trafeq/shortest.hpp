#pragma once

#include <span>
#include <vector>

#include "trafeq/network.hpp"
#include "trafeq/oracle.hpp"

namespace trafeq {

inline constexpr EdgeId kNoEdge = -1;

struct ShortestTree {
  NodeId source = 0;
  std::vector<double> dist;         // +inf when unreachable
  std::vector<EdgeId> parent_edge;  // kNoEdge for the source / unreachable
  std::vector<NodeId> settle_order; // reachable nodes, source first
};

/// Dijkstra with a lazy-deletion binary heap. Among equal-cost paths the
/// parent edge is the first relaxing edge in (settle order, edge index).
/// Throws InvalidArgument on a negative edge time.
ShortestTree dijkstra(const Network& net, std::span<const double> t,
                      NodeId source);

/// Edge flows from routing each destination's demand along the tree:
/// one leaves-to-root pass. Throws UnreachableError if a positive demand
/// lands on an unreachable node.
std::vector<double> tree_flows(const Network& net, const ShortestTree& tree,
                               std::span<const Destination> demands);

/// Φ(t) = −Σ_w d_w dist_w(t) with all-or-nothing flows and grad = −flows.
OracleResult det_oracle(const Network& net, std::span<const double> t,
                        const DemandMatrix& dm, int threads = 1);

class ShortestPathOracle final : public DualOracle {
 public:
  ShortestPathOracle(const Network& net, const DemandMatrix& dm,
                     int threads = 1)
      : net_(net), dm_(dm), threads_(threads) {}

  double value(std::span<const double> t) const override;
  OracleResult evaluate(std::span<const double> t) const override;

 private:
  const Network& net_;
  const DemandMatrix& dm_;
  int threads_;
};

}  // namespace trafeq
