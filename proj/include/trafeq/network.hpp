#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace trafeq {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;

struct Edge {
  NodeId tail = 0;
  NodeId head = 0;
  double free_flow_time = 1.0;  // t̄_e > 0
  double capacity = 1.0;        // > 0
  double rho = 0.15;            // BPR "b", >= 0
  double power = 4.0;           // BPR power; mu = 1 / power

  // Columns carried through from TNTP but not used by the cost model.
  double length = 0.0;
  double speed = 0.0;
  double toll = 0.0;
  int link_type = 1;

  double mu() const { return 1.0 / power; }
};

/// Directed multigraph with dense 0-based node and edge ids. Immutable once
/// built; construct through Network::build or parse_tntp_net.
class Network {
 public:
  Network() = default;

  /// Validates edge fields and builds adjacency. Throws InvalidArgument.
  static Network build(int node_count, std::vector<Edge> edges,
                       int zone_count = 0, int first_thru_node = 1);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int zone_count() const { return zone_count_; }
  int first_thru_node() const { return first_thru_node_; }

  const Edge& edge(EdgeId e) const { return edges_[static_cast<size_t>(e)]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<EdgeId>& out_edges(NodeId v) const {
    return out_[static_cast<size_t>(v)];
  }
  const std::vector<EdgeId>& in_edges(NodeId v) const {
    return in_[static_cast<size_t>(v)];
  }

  std::vector<double> free_flow_times() const;
  std::vector<double> capacities() const;
  int max_out_degree() const;

  /// Ids as they appear in input files (1-based).
  static NodeId external_id(NodeId internal) { return internal + 1; }
  static NodeId internal_id(NodeId external) { return external - 1; }

 private:
  int node_count_ = 0;
  int zone_count_ = 0;
  int first_thru_node_ = 1;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<EdgeId>> in_;
};

struct Destination {
  NodeId node;
  double demand;
};

struct OriginDemand {
  NodeId origin;
  std::vector<Destination> destinations;  // sorted by node, demands > 0

  double total() const;
};

/// Positive origin-destination demands grouped by origin.
class DemandMatrix {
 public:
  DemandMatrix() = default;

  /// Adds `demand` to the (origin, destination) pair. Zero demand and
  /// origin == destination are ignored; negative demand throws.
  void add(NodeId origin, NodeId destination, double demand);

  const std::vector<OriginDemand>& origins() const { return origins_; }
  int origin_count() const { return static_cast<int>(origins_.size()); }
  int pair_count() const;
  double total() const;
  double demand(NodeId origin, NodeId destination) const;

  /// Throws InvalidArgument if any endpoint is outside the network's node
  /// range or (when zones are declared) outside the zone range.
  void check_against(const Network& net) const;

 private:
  std::vector<OriginDemand> origins_;  // sorted by origin
};

struct OdPair {
  NodeId origin;
  NodeId destination;
};

Network parse_tntp_net(std::istream& in, const std::string& source = {});
Network parse_tntp_net_file(const std::string& path);
DemandMatrix parse_tntp_trips(std::istream& in, const std::string& source = {});
DemandMatrix parse_tntp_trips_file(const std::string& path);

/// TNTP network text; numeric fields printed with round-trip precision.
std::string write_tntp_net(const Network& net);

/// Pairs with no directed walk of at most `walk_cap` edges.
std::vector<OdPair> validate_reachability(const Network& net,
                                          const DemandMatrix& dm,
                                          int walk_cap);

}  // namespace trafeq
