#include "trafeq/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "text_util.hpp"
#include "trafeq/error.hpp"

namespace trafeq {

Network Network::build(int node_count, std::vector<Edge> edges,
                       int zone_count, int first_thru_node) {
  if (node_count <= 0) throw InvalidArgument("network needs at least one node");
  Network net;
  net.node_count_ = node_count;
  net.zone_count_ = zone_count;
  net.first_thru_node_ = first_thru_node;
  net.out_.resize(static_cast<size_t>(node_count));
  net.in_.resize(static_cast<size_t>(node_count));
  for (size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    const std::string where = "edge " + std::to_string(i) + ": ";
    if (e.tail < 0 || e.tail >= node_count || e.head < 0 ||
        e.head >= node_count)
      throw InvalidArgument(where + "node id out of range");
    if (e.tail == e.head) throw InvalidArgument(where + "self-loop");
    if (!(e.free_flow_time > 0.0))
      throw InvalidArgument(where + "free-flow time must be positive");
    if (!(e.capacity > 0.0))
      throw InvalidArgument(where + "capacity must be positive");
    if (!(e.rho >= 0.0)) throw InvalidArgument(where + "b must be >= 0");
    if (!(e.power >= 1.0)) throw InvalidArgument(where + "power must be >= 1");
    net.out_[static_cast<size_t>(e.tail)].push_back(static_cast<EdgeId>(i));
    net.in_[static_cast<size_t>(e.head)].push_back(static_cast<EdgeId>(i));
  }
  net.edges_ = std::move(edges);
  return net;
}

std::vector<double> Network::free_flow_times() const {
  std::vector<double> out(edges_.size());
  for (size_t i = 0; i < edges_.size(); ++i) out[i] = edges_[i].free_flow_time;
  return out;
}

std::vector<double> Network::capacities() const {
  std::vector<double> out(edges_.size());
  for (size_t i = 0; i < edges_.size(); ++i) out[i] = edges_[i].capacity;
  return out;
}

int Network::max_out_degree() const {
  size_t best = 0;
  for (const auto& adj : out_) best = std::max(best, adj.size());
  return static_cast<int>(best);
}

double OriginDemand::total() const {
  double s = 0.0;
  for (const auto& d : destinations) s += d.demand;
  return s;
}

void DemandMatrix::add(NodeId origin, NodeId destination, double demand) {
  if (demand < 0.0 || std::isnan(demand))
    throw InvalidArgument("negative demand");
  if (demand == 0.0 || origin == destination) return;
  auto it = std::lower_bound(
      origins_.begin(), origins_.end(), origin,
      [](const OriginDemand& o, NodeId v) { return o.origin < v; });
  if (it == origins_.end() || it->origin != origin)
    it = origins_.insert(it, OriginDemand{origin, {}});
  auto& dests = it->destinations;
  auto jt = std::lower_bound(
      dests.begin(), dests.end(), destination,
      [](const Destination& d, NodeId v) { return d.node < v; });
  if (jt != dests.end() && jt->node == destination)
    jt->demand += demand;
  else
    dests.insert(jt, Destination{destination, demand});
}

int DemandMatrix::pair_count() const {
  int n = 0;
  for (const auto& o : origins_) n += static_cast<int>(o.destinations.size());
  return n;
}

double DemandMatrix::total() const {
  double s = 0.0;
  for (const auto& o : origins_) s += o.total();
  return s;
}

double DemandMatrix::demand(NodeId origin, NodeId destination) const {
  for (const auto& o : origins_) {
    if (o.origin != origin) continue;
    for (const auto& d : o.destinations)
      if (d.node == destination) return d.demand;
  }
  return 0.0;
}

void DemandMatrix::check_against(const Network& net) const {
  const int limit = net.zone_count() > 0
                        ? std::min(net.zone_count(), net.node_count())
                        : net.node_count();
  auto check = [&](NodeId v) {
    if (v < 0 || v >= limit)
      throw InvalidArgument("demand endpoint " +
                            std::to_string(Network::external_id(v)) +
                            " is not a zone of the network");
  };
  for (const auto& o : origins_) {
    check(o.origin);
    for (const auto& d : o.destinations) check(d.node);
  }
  if (!(total() > 0.0)) throw InvalidArgument("total demand must be positive");
}

namespace {

struct Metadata {
  std::map<std::string, std::string> tags;
  int lines_consumed = 0;
};

// Reads `<TAG> value` lines up to and including <END OF METADATA>.
Metadata read_metadata(std::istream& in, const std::string& source) {
  Metadata meta;
  std::string line;
  while (std::getline(in, line)) {
    ++meta.lines_consumed;
    std::string_view s = detail::trim(line);
    if (s.empty() || s.front() == '~') continue;
    if (s.front() != '<')
      throw ParseError(source, meta.lines_consumed,
                       "expected a <TAG> line before <END OF METADATA>");
    const auto close = s.find('>');
    if (close == std::string_view::npos)
      throw ParseError(source, meta.lines_consumed, "malformed header tag");
    std::string tag(detail::trim(s.substr(1, close - 1)));
    if (tag.empty())
      throw ParseError(source, meta.lines_consumed, "malformed header tag");
    if (tag == "END OF METADATA") return meta;
    meta.tags[tag] = std::string(detail::trim(s.substr(close + 1)));
  }
  throw ParseError(source, 0, "missing <END OF METADATA>");
}

int int_tag(const Metadata& meta, const std::string& tag, bool required,
            const std::string& source, int fallback = 0) {
  auto it = meta.tags.find(tag);
  if (it == meta.tags.end()) {
    if (required) throw ParseError(source, 0, "missing <" + tag + ">");
    return fallback;
  }
  long long v = 0;
  if (!detail::parse_int(it->second, v))
    throw ParseError(source, 0, "malformed value for <" + tag + ">");
  return static_cast<int>(v);
}

}  // namespace

Network parse_tntp_net(std::istream& in, const std::string& source) {
  const Metadata meta = read_metadata(in, source);
  const int nodes = int_tag(meta, "NUMBER OF NODES", true, source);
  const int links = int_tag(meta, "NUMBER OF LINKS", true, source);
  const int zones = int_tag(meta, "NUMBER OF ZONES", false, source, 0);
  const int first_thru = int_tag(meta, "FIRST THRU NODE", false, source, 1);
  if (nodes <= 0) throw ParseError(source, 0, "<NUMBER OF NODES> must be positive");

  std::vector<Edge> edges;
  edges.reserve(links > 0 ? static_cast<size_t>(links) : 0);
  std::string line;
  int line_no = meta.lines_consumed;
  std::vector<std::string_view> cols;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = detail::trim(line);
    if (s.empty() || s.front() == '~') continue;
    if (auto semi = s.find(';'); semi != std::string_view::npos)
      s = s.substr(0, semi);
    detail::split_ws(s, cols);
    if (cols.size() < 10)
      throw ParseError(source, line_no,
                       "link row has " + std::to_string(cols.size()) +
                           " columns, expected 10");
    long long tail = 0, head = 0, type = 0;
    Edge e;
    bool ok = detail::parse_int(cols[0], tail) &&
              detail::parse_int(cols[1], head) &&
              detail::parse_double(cols[2], e.capacity) &&
              detail::parse_double(cols[3], e.length) &&
              detail::parse_double(cols[4], e.free_flow_time) &&
              detail::parse_double(cols[5], e.rho) &&
              detail::parse_double(cols[6], e.power) &&
              detail::parse_double(cols[7], e.speed) &&
              detail::parse_double(cols[8], e.toll) &&
              detail::parse_int(cols[9], type);
    if (!ok) throw ParseError(source, line_no, "malformed numeric field");
    if (tail < 1 || tail > nodes || head < 1 || head > nodes)
      throw ParseError(source, line_no, "node id out of range");
    if (tail == head) throw ParseError(source, line_no, "self-loop");
    if (!(e.capacity > 0.0))
      throw ParseError(source, line_no, "capacity must be positive");
    if (!(e.free_flow_time > 0.0))
      throw ParseError(source, line_no, "free-flow time must be positive");
    if (!(e.rho >= 0.0)) throw ParseError(source, line_no, "b must be >= 0");
    if (!(e.power >= 1.0))
      throw ParseError(source, line_no, "power must be >= 1");
    e.tail = Network::internal_id(static_cast<NodeId>(tail));
    e.head = Network::internal_id(static_cast<NodeId>(head));
    e.link_type = static_cast<int>(type);
    edges.push_back(e);
  }
  if (static_cast<int>(edges.size()) != links)
    throw ParseError(source, 0,
                     "<NUMBER OF LINKS> is " + std::to_string(links) +
                         " but " + std::to_string(edges.size()) +
                         " link rows were read");
  return Network::build(nodes, std::move(edges), zones, first_thru);
}

Network parse_tntp_net_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse_tntp_net(in, path);
}

DemandMatrix parse_tntp_trips(std::istream& in, const std::string& source) {
  const Metadata meta = read_metadata(in, source);
  DemandMatrix dm;
  std::string line;
  int line_no = meta.lines_consumed;
  long long origin = -1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = detail::trim(line);
    if (s.empty() || s.front() == '~') continue;
    if (s.substr(0, 6) == "Origin") {
      if (!detail::parse_int(detail::trim(s.substr(6)), origin) || origin < 1)
        throw ParseError(source, line_no, "malformed Origin line");
      continue;
    }
    if (origin < 1)
      throw ParseError(source, line_no, "demand entry outside an Origin block");
    while (!s.empty()) {
      const auto semi = s.find(';');
      std::string_view entry = detail::trim(s.substr(0, semi));
      s = semi == std::string_view::npos ? std::string_view{}
                                         : detail::trim(s.substr(semi + 1));
      if (entry.empty()) continue;
      const auto colon = entry.find(':');
      long long dest = 0;
      double value = 0.0;
      if (colon == std::string_view::npos ||
          !detail::parse_int(detail::trim(entry.substr(0, colon)), dest) ||
          !detail::parse_double(detail::trim(entry.substr(colon + 1)), value) ||
          dest < 1)
        throw ParseError(source, line_no,
                         "malformed entry '" + std::string(entry) + "'");
      if (value < 0.0) throw ParseError(source, line_no, "negative demand");
      dm.add(Network::internal_id(static_cast<NodeId>(origin)),
             Network::internal_id(static_cast<NodeId>(dest)), value);
    }
  }
  return dm;
}

DemandMatrix parse_tntp_trips_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse_tntp_trips(in, path);
}

std::string write_tntp_net(const Network& net) {
  std::ostringstream os;
  os << "<NUMBER OF ZONES> " << net.zone_count() << "\n"
     << "<NUMBER OF NODES> " << net.node_count() << "\n"
     << "<FIRST THRU NODE> " << net.first_thru_node() << "\n"
     << "<NUMBER OF LINKS> " << net.edge_count() << "\n"
     << "<END OF METADATA>\n\n"
     << "~\tinit_node\tterm_node\tcapacity\tlength\tfree_flow_time\tb\tpower"
        "\tspeed\ttoll\tlink_type\t;\n";
  using detail::shortest_repr;
  for (const Edge& e : net.edges()) {
    os << '\t' << Network::external_id(e.tail) << '\t'
       << Network::external_id(e.head) << '\t' << shortest_repr(e.capacity)
       << '\t' << shortest_repr(e.length) << '\t'
       << shortest_repr(e.free_flow_time) << '\t' << shortest_repr(e.rho)
       << '\t' << shortest_repr(e.power) << '\t' << shortest_repr(e.speed)
       << '\t' << shortest_repr(e.toll) << '\t' << e.link_type << "\t;\n";
  }
  return os.str();
}

std::vector<OdPair> validate_reachability(const Network& net,
                                          const DemandMatrix& dm,
                                          int walk_cap) {
  std::vector<OdPair> missing;
  std::vector<int> hops(static_cast<size_t>(net.node_count()));
  std::vector<NodeId> frontier, next;
  for (const auto& o : dm.origins()) {
    // Breadth-first levels: hops[v] = fewest edges on a walk origin -> v.
    std::fill(hops.begin(), hops.end(), -1);
    hops[static_cast<size_t>(o.origin)] = 0;
    frontier.assign(1, o.origin);
    for (int level = 1; level <= walk_cap && !frontier.empty(); ++level) {
      next.clear();
      for (NodeId v : frontier)
        for (EdgeId e : net.out_edges(v)) {
          const NodeId w = net.edge(e).head;
          if (hops[static_cast<size_t>(w)] < 0) {
            hops[static_cast<size_t>(w)] = level;
            next.push_back(w);
          }
        }
      frontier.swap(next);
    }
    for (const auto& d : o.destinations)
      if (hops[static_cast<size_t>(d.node)] < 1)
        missing.push_back({o.origin, d.node});
  }
  return missing;
}

}  // namespace trafeq
