#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "trafeq/char_fn.hpp"
#include "trafeq/error.hpp"
#include "trafeq/shortest.hpp"

using namespace trafeq;

namespace {

DemandMatrix single(NodeId o, NodeId d, double amount) {
  DemandMatrix dm;
  dm.add(o, d, amount);
  return dm;
}

// 0 -> {1, 2} -> 3 with walk costs 1+2 and 2+2.5.
Network diamond() {
  return Network::build(4, {oracle::edge(0, 1, 1.0), oracle::edge(1, 3, 2.0),
                            oracle::edge(0, 2, 2.0), oracle::edge(2, 3, 2.5)});
}

}  // namespace

TEST_CASE("one edge, one walk") {
  const Network net = Network::build(2, {oracle::edge(0, 1, 4.0)});
  const std::vector<double> t{4.0};
  const PsiTables tab = char_fn_forward(net, t, 0.7, 1, 0);
  CHECK(tab.b_at(1, 1) == -4.0);
  CHECK(tab.a_at(1, 1) == -4.0);
  CHECK(tab.b_at(1, 0) == kNegInf);
  const DemandMatrix dm = single(0, 1, 3.0);
  CHECK(char_fn_value(net, t, 0.7, 1, dm) == -12.0);
  const OracleResult r = char_fn_gradient(net, t, 0.7, 1, dm);
  CHECK(r.flows[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(r.grad[0] == -r.flows[0]);
}

TEST_CASE("two equal parallel edges") {
  const double g = 0.4;
  const Network net =
      Network::build(2, {oracle::edge(0, 1, 2.0), oracle::edge(0, 1, 2.0)});
  const std::vector<double> t{2.0, 2.0};
  const PsiTables tab = char_fn_forward(net, t, g, 1, 0);
  CHECK(tab.b_at(1, 1) == doctest::Approx(-2.0 + g * std::log(2.0)).epsilon(1e-15));
  const DemandMatrix dm = single(0, 1, 5.0);
  CHECK(char_fn_value(net, t, g, 1, dm) ==
        doctest::Approx(5.0 * (-2.0 + g * std::log(2.0))).epsilon(1e-15));
  const OracleResult r = char_fn_gradient(net, t, g, 1, dm);
  CHECK(r.flows[0] == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(r.flows[1] == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("diamond against explicit enumeration and the logit split") {
  const Network net = diamond();
  const std::vector<double> t = net.free_flow_times();
  const double gamma = 0.8, d = 2.0;
  const double g1 = 3.0, g2 = 4.5;
  const double expected =
      gamma * std::log(std::exp(-g1 / gamma) + std::exp(-g2 / gamma));
  const PsiTables tab = char_fn_forward(net, t, gamma, 2, 0);
  CHECK(tab.b_at(2, 3) == doctest::Approx(expected).epsilon(1e-14));
  const OracleResult r = char_fn_gradient(net, t, gamma, 2, single(0, 3, d));
  const double p1 =
      std::exp(-g1 / gamma) / (std::exp(-g1 / gamma) + std::exp(-g2 / gamma));
  CHECK(r.flows[0] == doctest::Approx(d * p1).epsilon(1e-13));
  CHECK(r.flows[1] == doctest::Approx(d * p1).epsilon(1e-13));
  CHECK(r.flows[2] == doctest::Approx(d * (1 - p1)).epsilon(1e-13));
}

TEST_CASE("random 8-node graphs match walk enumeration") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    const Network net = oracle::random_network(rng, 8, 14);
    const DemandMatrix dm = oracle::random_demand(rng, 8, 6);
    std::vector<double> t = net.free_flow_times();
    const int H = 7;
    const auto ref = oracle::logit_by_enumeration(net, t, 1.0, H, dm);
    const OracleResult r = char_fn_gradient(net, t, 1.0, H, dm);
    CHECK(r.value == doctest::Approx(ref.value).epsilon(1e-10));
    CHECK(char_fn_value(net, t, 1.0, H, dm) == doctest::Approx(ref.value).epsilon(1e-10));
    for (size_t e = 0; e < t.size(); ++e)
      CHECK(r.flows[e] == doctest::Approx(ref.flows[e]).epsilon(1e-9).scale(dm.total()));
  }
}

TEST_CASE("b is nondecreasing in the level") {
  std::mt19937_64 rng(13);
  const Network net = oracle::random_network(rng, 9, 20);
  const auto t = net.free_flow_times();
  const PsiTables tab = char_fn_forward(net, t, 0.5, 12, 0);
  for (int l = 1; l < 12; ++l)
    for (NodeId j = 0; j < net.node_count(); ++j)
      CHECK(tab.b_at(l + 1, j) >= tab.b_at(l, j));
}

TEST_CASE("flow conservation") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Network net = oracle::random_network(rng, 10, 25);
    const DemandMatrix dm = oracle::random_demand(rng, 10, 12);
    const auto t = net.free_flow_times();
    const OracleResult r = char_fn_gradient(net, t, 0.7, 9, dm);
    std::vector<double> balance(10, 0.0);  // out − in − (originating − terminating)
    for (EdgeId e = 0; e < net.edge_count(); ++e) {
      CHECK(r.flows[static_cast<size_t>(e)] >= 0.0);
      balance[net.edge(e).tail] += r.flows[static_cast<size_t>(e)];
      balance[net.edge(e).head] -= r.flows[static_cast<size_t>(e)];
    }
    for (const auto& o : dm.origins())
      for (const auto& d : o.destinations) {
        balance[o.origin] -= d.demand;
        balance[d.node] += d.demand;
      }
    for (double b : balance) CHECK(std::abs(b) <= 1e-9 * dm.total());
  }
}

TEST_CASE("homogeneity: value(c t, c γ) = c value(t, γ)") {
  std::mt19937_64 rng(19);
  const Network net = oracle::random_network(rng, 7, 15);
  const DemandMatrix dm = oracle::random_demand(rng, 7, 5);
  const auto t = net.free_flow_times();
  for (double c : {0.1, 3.0, 17.0}) {
    std::vector<double> ct(t);
    for (double& x : ct) x *= c;
    CHECK(char_fn_value(net, ct, c * 0.6, 6, dm) ==
          doctest::Approx(c * char_fn_value(net, t, 0.6, 6, dm)).epsilon(1e-12));
  }
}

TEST_CASE("small γ approaches shortest distances from below") {
  std::mt19937_64 rng(23);
  const double gamma = 1e-3;
  for (int trial = 0; trial < 10; ++trial) {
    const Network net = oracle::random_network(rng, 6, 11);
    const auto t = net.free_flow_times();
    const int H = 5;
    for (NodeId s = 0; s < 6; ++s) {
      const PsiTables tab = char_fn_forward(net, t, gamma, H, s);
      const auto dist = oracle::bellman_ford(net, t, s);
      for (NodeId j = 0; j < 6; ++j) {
        if (j == s) continue;
        const double gap = dist[j] + tab.b_at(H, j);
        const long walks = oracle::count_walks(net, s, j, H);
        CHECK(gap >= -1e-12);
        CHECK(gap <= gamma * std::log(static_cast<double>(walks)) + 1e-12);
      }
    }
  }
}

TEST_CASE("small-γ flows approach all-or-nothing flows") {
  const Network net = diamond();
  const auto t = net.free_flow_times();
  const DemandMatrix dm = single(0, 3, 4.0);
  const OracleResult smooth = char_fn_gradient(net, t, 1e-3, 3, dm);
  const OracleResult hard = det_oracle(net, t, dm);
  for (size_t e = 0; e < t.size(); ++e)
    CHECK(std::abs(smooth.flows[e] - hard.flows[e]) <= 1e-2 * dm.total());
}

TEST_CASE("threaded evaluation is bit-identical") {
  std::mt19937_64 rng(29);
  const Network net = oracle::random_network(rng, 10, 25);
  const DemandMatrix dm = oracle::random_demand(rng, 10, 30);
  const auto t = net.free_flow_times();
  const OracleResult one = char_fn_gradient(net, t, 0.5, 9, dm, 1);
  const OracleResult four = char_fn_gradient(net, t, 0.5, 9, dm, 4);
  CHECK(one.value == four.value);
  CHECK(one.flows == four.flows);
}

TEST_CASE("errors") {
  const Network net = Network::build(3, {oracle::edge(0, 1), oracle::edge(1, 2)});
  const auto t = net.free_flow_times();
  CHECK_THROWS_AS(char_fn_value(net, t, 1.0, 1, single(0, 2, 1.0)), UnreachableError);
  CHECK_THROWS_AS(char_fn_forward(net, t, 0.0, 2, 0), InvalidArgument);
  CHECK_THROWS_AS(char_fn_forward(net, t, 1.0, 0, 0), InvalidArgument);
}

TEST_CASE("log_add") {
  CHECK(log_add(kNegInf, 3.0, 1.0) == 3.0);
  CHECK(log_add(3.0, kNegInf, 1.0) == 3.0);
  CHECK(log_add(kNegInf, kNegInf, 1.0) == kNegInf);
  CHECK(log_add(-1000.0, -1000.0, 1e-3) ==
        doctest::Approx(-1000.0 + 1e-3 * std::log(2.0)).epsilon(1e-15));
}
