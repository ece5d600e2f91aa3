#pragma once

#include <limits>
#include <span>
#include <vector>

#include "trafeq/network.hpp"
#include "trafeq/oracle.hpp"

namespace trafeq {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Log-domain walk sums from one source, level by level:
///   a(l, j) = γ ln Σ exp(−cost/γ) over walks source -> j with exactly l edges,
///   b(l, j) = the same over walks with 1..l edges.
/// Level 0 is stored as the seed (a(0, source) = 0, everything else −inf).
/// Entries with no walks hold −inf.
struct PsiTables {
  NodeId source = 0;
  int walk_cap = 0;
  double gamma = 1.0;
  int node_count = 0;
  std::vector<double> a;  // (walk_cap + 1) x node_count, row-major
  std::vector<double> b;

  double a_at(int level, NodeId j) const {
    return a[static_cast<size_t>(level) * static_cast<size_t>(node_count) +
             static_cast<size_t>(j)];
  }
  double b_at(int level, NodeId j) const {
    return b[static_cast<size_t>(level) * static_cast<size_t>(node_count) +
             static_cast<size_t>(j)];
  }
};

/// γ ln(e^(x/γ) + e^(y/γ)) with max-shift; −inf is the identity.
double log_add(double x, double y, double gamma);

PsiTables char_fn_forward(const Network& net, std::span<const double> t,
                          double gamma, int walk_cap, NodeId source);

/// Φ(t) = γψ(t/γ) = Σ_w d_w b(H, j_w). Throws UnreachableError when a
/// positive-demand pair has no walk within the cap.
double char_fn_value(const Network& net, std::span<const double> t,
                     double gamma, int walk_cap, const DemandMatrix& dm,
                     int threads = 1);

/// Value, gradient and edge flows by a reverse sweep over the tables.
OracleResult char_fn_gradient(const Network& net, std::span<const double> t,
                              double gamma, int walk_cap,
                              const DemandMatrix& dm, int threads = 1);

class CharFnOracle final : public DualOracle {
 public:
  CharFnOracle(const Network& net, const DemandMatrix& dm, double gamma,
               int walk_cap, int threads = 1);

  double value(std::span<const double> t) const override;
  OracleResult evaluate(std::span<const double> t) const override;

  double gamma() const { return gamma_; }
  int walk_cap() const { return walk_cap_; }

 private:
  const Network& net_;
  const DemandMatrix& dm_;
  double gamma_;
  int walk_cap_;
  int threads_;
};

}  // namespace trafeq
