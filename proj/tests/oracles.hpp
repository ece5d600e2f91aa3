// Reference computations used as test oracles. Each one solves its problem
// by brute force (enumeration, relaxation to a fixed point, grid or 1-D
// search) and shares no code with the library beyond the data types.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "trafeq/network.hpp"
#include "trafeq/oracle.hpp"

namespace oracle {

using trafeq::DemandMatrix;
using trafeq::Edge;
using trafeq::EdgeId;
using trafeq::Network;
using trafeq::NodeId;

constexpr double kInf = std::numeric_limits<double>::infinity();

inline Edge edge(NodeId tail, NodeId head, double fft = 1.0, double cap = 1.0,
                 double rho = 0.15, double power = 4.0) {
  Edge e;
  e.tail = tail;
  e.head = head;
  e.free_flow_time = fft;
  e.capacity = cap;
  e.rho = rho;
  e.power = power;
  return e;
}

// ---------------------------------------------------------------- walks

/// Every walk (edge sequence, repeats allowed) from `source` with 1..cap
/// edges, grouped by end node.
inline std::map<NodeId, std::vector<std::vector<EdgeId>>> enumerate_walks(
    const Network& net, NodeId source, int cap) {
  std::map<NodeId, std::vector<std::vector<EdgeId>>> out;
  std::vector<EdgeId> walk;
  std::function<void(NodeId)> grow = [&](NodeId v) {
    if (static_cast<int>(walk.size()) == cap) return;
    for (EdgeId e = 0; e < net.edge_count(); ++e) {
      if (net.edge(e).tail != v) continue;
      walk.push_back(e);
      out[net.edge(e).head].push_back(walk);
      grow(net.edge(e).head);
      walk.pop_back();
    }
  };
  grow(source);
  return out;
}

inline double walk_cost(const std::vector<EdgeId>& w, std::span<const double> t) {
  double s = 0.0;
  for (EdgeId e : w) s += t[static_cast<size_t>(e)];
  return s;
}

/// Logit assignment over enumerated walks: value γ Σ_w d_w ln Σ_p e^{−g_p/γ},
/// edge flows, and the path entropy γ Σ_w Σ_p x_p ln(x_p / d_w).
struct LogitResult {
  double value = 0.0;
  std::vector<double> flows;
  double entropy = 0.0;
  long walks = 0;
};

inline LogitResult logit_by_enumeration(const Network& net,
                                        std::span<const double> t,
                                        double gamma, int cap,
                                        const DemandMatrix& dm) {
  LogitResult r;
  r.flows.assign(static_cast<size_t>(net.edge_count()), 0.0);
  for (const auto& o : dm.origins()) {
    const auto walks = enumerate_walks(net, o.origin, cap);
    for (const auto& d : o.destinations) {
      const auto it = walks.find(d.node);
      if (it == walks.end()) {
        r.value = -kInf;
        continue;
      }
      const auto& ws = it->second;
      r.walks += static_cast<long>(ws.size());
      std::vector<double> g;
      for (const auto& w : ws) g.push_back(walk_cost(w, t));
      const double gmin = *std::min_element(g.begin(), g.end());
      double z = 0.0;
      for (double gi : g) z += std::exp(-(gi - gmin) / gamma);
      r.value += d.demand * (-gmin + gamma * std::log(z));
      for (size_t i = 0; i < ws.size(); ++i) {
        const double share = std::exp(-(g[i] - gmin) / gamma) / z;
        const double x = d.demand * share;
        if (x > 0.0) r.entropy += gamma * x * std::log(share);
        for (EdgeId e : ws[i]) r.flows[static_cast<size_t>(e)] += x;
      }
    }
  }
  return r;
}

/// Number of walks from each origin to each destination within the cap.
inline long count_walks(const Network& net, NodeId s, NodeId d, int cap) {
  const auto walks = enumerate_walks(net, s, cap);
  const auto it = walks.find(d);
  return it == walks.end() ? 0 : static_cast<long>(it->second.size());
}

// -------------------------------------------------------- shortest paths

/// Bellman–Ford: relax every edge until nothing changes.
inline std::vector<double> bellman_ford(const Network& net,
                                        std::span<const double> t,
                                        NodeId source) {
  std::vector<double> dist(static_cast<size_t>(net.node_count()), kInf);
  dist[static_cast<size_t>(source)] = 0.0;
  for (int round = 0; round < net.node_count(); ++round) {
    bool changed = false;
    for (EdgeId e = 0; e < net.edge_count(); ++e) {
      const Edge& ed = net.edge(e);
      const double via = dist[static_cast<size_t>(ed.tail)] + t[static_cast<size_t>(e)];
      if (via < dist[static_cast<size_t>(ed.head)]) {
        dist[static_cast<size_t>(ed.head)] = via;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

// --------------------------------------------------------- random cases

/// Random simple-ish digraph: a directed cycle through every node keeps all
/// pairs reachable, then extra random edges (parallel edges allowed).
inline Network random_network(std::mt19937_64& rng, int nodes, int edges,
                              double t_lo = 0.5, double t_hi = 3.0) {
  std::uniform_real_distribution<double> time(t_lo, t_hi);
  std::uniform_real_distribution<double> cap(0.5, 3.0);
  std::uniform_int_distribution<int> pick(0, nodes - 1);
  std::vector<Edge> es;
  for (int v = 0; v < nodes && static_cast<int>(es.size()) < edges; ++v)
    es.push_back(edge(v, (v + 1) % nodes, time(rng), cap(rng)));
  while (static_cast<int>(es.size()) < edges) {
    const int a = pick(rng), b = pick(rng);
    if (a != b) es.push_back(edge(a, b, time(rng), cap(rng)));
  }
  return Network::build(nodes, std::move(es));
}

inline DemandMatrix random_demand(std::mt19937_64& rng, int nodes, int pairs,
                                  double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> amount(lo, hi);
  std::uniform_int_distribution<int> pick(0, nodes - 1);
  DemandMatrix dm;
  while (dm.pair_count() < pairs) {
    const int a = pick(rng), b = pick(rng);
    if (a != b && dm.demand(a, b) == 0.0) dm.add(a, b, amount(rng));
  }
  return dm;
}

// ------------------------------------------------------------ 1-D tools

/// Minimum of a unimodal function on [lo, hi].
inline double golden_section(const std::function<double(double)>& f,
                             double lo, double hi, double tol = 1e-12) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Root of an increasing function on [lo, hi] with f(lo) <= 0 <= f(hi).
inline double bisect(const std::function<double(double)>& f, double lo,
                     double hi) {
  for (int i = 0; i < 400 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Composite Gauss–Legendre (5 points) on n panels.
inline double integrate(const std::function<double(double)>& f, double lo,
                        double hi, int panels = 2000) {
  static const double x[] = {0.0, -0.5384693101056831, 0.5384693101056831,
                             -0.9061798459386640, 0.9061798459386640};
  static const double w[] = {0.5688888888888889, 0.4786286704993665,
                             0.4786286704993665, 0.2369268850561891,
                             0.2369268850561891};
  const double h = (hi - lo) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h;
    for (int i = 0; i < 5; ++i) s += w[i] * f(mid + 0.5 * h * x[i]);
  }
  return 0.5 * h * s;
}

// -------------------------------------------------------- equilibria

/// BPR τ written out independently of the library.
inline double bpr(const Edge& e, double f) {
  return e.free_flow_time * (1.0 + e.rho * std::pow(f / e.capacity, e.power));
}

/// Two parallel routes a, b carrying demand d: the split x on route a at
/// which both times are equal (or a corner if one route dominates).
inline double pigou_split(const Edge& a, const Edge& b, double d) {
  auto excess = [&](double x) { return bpr(a, x) - bpr(b, d - x); };
  if (excess(0.0) >= 0.0) return 0.0;
  if (excess(d) <= 0.0) return d;
  return bisect(excess, 0.0, d);
}

// ----------------------------------------------------- synthetic duals

/// Φ(t) = ½ (t − c)ᵀ M (t − c) with M = BᵀB + λI, a smooth convex test
/// objective whose Lipschitz constant is the top eigenvalue of M.
class QuadraticOracle final : public trafeq::DualOracle {
 public:
  QuadraticOracle(std::mt19937_64& rng, int n, double lambda = 0.1) : n_(n) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> b(static_cast<size_t>(n * n));
    for (double& v : b) v = g(rng);
    m_.assign(static_cast<size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = i == j ? lambda : 0.0;
        for (int k = 0; k < n; ++k) s += b[k * n + i] * b[k * n + j];
        m_[i * n + j] = s;
      }
    c_.resize(static_cast<size_t>(n));
    for (double& v : c_) v = 3.0 * g(rng);
  }

  double value(std::span<const double> t) const override {
    const auto mv = apply(t);
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += 0.5 * (t[i] - c_[i]) * mv[i];
    return s;
  }

  trafeq::OracleResult evaluate(std::span<const double> t) const override {
    trafeq::OracleResult r;
    r.value = value(t);
    r.grad = apply(t);
    r.flows.resize(r.grad.size());
    for (size_t i = 0; i < r.grad.size(); ++i) r.flows[i] = -r.grad[i];
    return r;
  }

  double hessian(int i, int j) const { return m_[i * n_ + j]; }
  const std::vector<double>& center() const { return c_; }

  /// Largest eigenvalue by power iteration.
  double lipschitz() const {
    std::vector<double> v(static_cast<size_t>(n_), 1.0), w(v.size());
    double lam = 0.0;
    for (int it = 0; it < 2000; ++it) {
      for (int i = 0; i < n_; ++i) {
        w[i] = 0.0;
        for (int j = 0; j < n_; ++j) w[i] += m_[i * n_ + j] * v[j];
      }
      double norm = 0.0;
      for (double x : w) norm += x * x;
      norm = std::sqrt(norm);
      for (int i = 0; i < n_; ++i) v[i] = w[i] / norm;
      lam = norm;
    }
    return lam;
  }

 private:
  std::vector<double> apply(std::span<const double> t) const {
    std::vector<double> out(static_cast<size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) out[i] += m_[i * n_ + j] * (t[j] - c_[j]);
    return out;
  }

  int n_;
  std::vector<double> m_;
  std::vector<double> c_;
};

/// argmin over t >= lower of ½‖t − lower‖² + ⟨G, t⟩, coordinatewise.
inline std::vector<double> bound_only_model_argmin(std::span<const double> G,
                                                   std::span<const double> lower) {
  std::vector<double> t(lower.size());
  for (size_t i = 0; i < t.size(); ++i) t[i] = std::max(lower[i], lower[i] - G[i]);
  return t;
}

}  // namespace oracle
