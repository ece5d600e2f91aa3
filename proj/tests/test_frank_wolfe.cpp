#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "trafeq/error.hpp"
#include "trafeq/frank_wolfe.hpp"
#include "trafeq/link_cost.hpp"
#include "trafeq/shortest.hpp"

using namespace trafeq;

namespace {

DemandMatrix single(NodeId o, NodeId d, double amount) {
  DemandMatrix dm;
  dm.add(o, d, amount);
  return dm;
}

Network two_bpr_routes() {
  return Network::build(2, {oracle::edge(0, 1, 10.0, 100.0, 0.15, 4.0),
                            oracle::edge(0, 1, 15.0, 200.0, 0.15, 4.0)});
}

}  // namespace

TEST_CASE("a single route is optimal from the start") {
  const Network net = Network::build(2, {oracle::edge(0, 1, 10.0, 100.0)});
  const FwState st = fw_run(net, single(0, 1, 150.0), FwOptions{});
  CHECK(st.converged);
  CHECK(st.k == 0);
  CHECK(st.fw_gap == 0.0);
  CHECK(st.flows[0] == 150.0);
  CHECK(st.objective == doctest::Approx(sigma(net.edge(0), 150.0)).epsilon(1e-15));
}

TEST_CASE("two routes converge to the equal-time split") {
  const Network net = two_bpr_routes();
  const double x = oracle::pigou_split(net.edge(0), net.edge(1), 300.0);
  for (StepRule rule : {StepRule::ExactLineSearch, StepRule::Harmonic}) {
    FwOptions opt;
    opt.eps_rel = 1e-6;
    opt.rule = rule;
    const FwState st = fw_run(net, single(0, 1, 300.0), opt);
    REQUIRE(st.converged);
    // Near the split the objective is quadratic in the error with curvature
    // τ'_a + τ'_b, so the FW gap bounds the flow error.
    const double curvature = 0.6 * 10.0 * std::pow(x / 100.0, 3) / 100.0 +
                             0.6 * 15.0 * std::pow((300.0 - x) / 200.0, 3) / 200.0;
    CHECK(std::abs(st.flows[0] - x) <= std::sqrt(2.0 * st.fw_gap / curvature) + 1e-9);
    CHECK(std::abs(st.flows[0] - x) <= 1e-2);
  }
}

TEST_CASE("Pigou: the constant route absorbs the surplus") {
  const Network net = Network::build(2, {oracle::edge(0, 1, 1.0, 1.0, 1.0, 1.0),
                                         oracle::edge(0, 1, 2.0, 1.0, 0.0, 1.0)});
  FwOptions opt;
  opt.eps_rel = 1e-8;
  const FwState st = fw_run(net, single(0, 1, 2.0), opt);
  REQUIRE(st.converged);
  CHECK(st.flows[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(st.flows[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gap is nonnegative, objective nonincreasing, demand feasible") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const Network net = oracle::random_network(rng, 9, 24);
    const DemandMatrix dm = oracle::random_demand(rng, 9, 15, 1.0, 4.0);
    FwOptions opt;
    opt.eps_rel = 1e-4;
    opt.max_iters = 300;
    const FwState st = fw_run(net, dm, opt);
    for (size_t i = 0; i < st.history.size(); ++i) {
      CHECK(st.history[i].fw_gap >= -1e-12 * (1 + std::abs(st.history[i].objective)));
      if (i > 0)
        CHECK(st.history[i].objective <=
              st.history[i - 1].objective * (1 + 1e-14) + 1e-12);
    }
    // Flow out of each node minus flow in equals its net demand.
    std::vector<double> balance(9, 0.0);
    for (EdgeId e = 0; e < net.edge_count(); ++e) {
      CHECK(st.flows[static_cast<size_t>(e)] >= 0.0);
      balance[net.edge(e).tail] += st.flows[static_cast<size_t>(e)];
      balance[net.edge(e).head] -= st.flows[static_cast<size_t>(e)];
    }
    for (const auto& o : dm.origins())
      for (const auto& d : o.destinations) {
        balance[o.origin] -= d.demand;
        balance[d.node] += d.demand;
      }
    for (double b : balance) CHECK(std::abs(b) <= 1e-9 * dm.total());
  }
}

TEST_CASE("all-or-nothing equals the shortest path oracle flows") {
  std::mt19937_64 rng(37);
  const Network net = oracle::random_network(rng, 10, 25);
  const DemandMatrix dm = oracle::random_demand(rng, 10, 20);
  const auto t = net.free_flow_times();
  CHECK(aon_assignment(net, dm, t) == det_oracle(net, t, dm).flows);
  const Network chain =
      Network::build(3, {oracle::edge(0, 1, 2.0), oracle::edge(1, 2, 3.0)});
  CHECK(aon_assignment(chain, single(0, 2, 4.0), chain.free_flow_times()) ==
        std::vector<double>{4.0, 4.0});
}

TEST_CASE("beckmann objective sums sigma") {
  const Network net = two_bpr_routes();
  const std::vector<double> f{40.0, 90.0};
  CHECK(beckmann_objective(net, f) ==
        sigma(net.edge(0), 40.0) + sigma(net.edge(1), 90.0));
}

TEST_CASE("comparison on a small network agrees") {
  std::mt19937_64 rng(53);
  const Network net = oracle::random_network(rng, 8, 20);
  const DemandMatrix dm = oracle::random_demand(rng, 8, 12, 1.0, 3.0);
  ModelSpec spec;
  spec.eps_rel = 1e-3;
  const CompareResult cmp = compare_solvers(net, dm, spec);
  CHECK(cmp.umst.converged);
  CHECK(cmp.fw.converged);
  CHECK(cmp.tolerance == 2.0 * 1e-3 * cmp.umst.gap0);
  CHECK(cmp.agree);
  CHECK(cmp.fw.fw_gap <= 1e-3 * cmp.umst.gap0);
  spec.gamma = 0.5;
  CHECK_THROWS_AS(compare_solvers(net, dm, spec), InvalidArgument);
}

TEST_CASE("comparison on Sioux Falls agrees") {
  const Network net = parse_tntp_net_file(TRAFEQ_DATA_DIR "/SiouxFalls_net.tntp");
  const DemandMatrix dm =
      parse_tntp_trips_file(TRAFEQ_DATA_DIR "/SiouxFalls_trips.tntp");
  ModelSpec spec;
  spec.eps_rel = 0.01;
  const CompareResult cmp = compare_solvers(net, dm, spec);
  CHECK(cmp.umst.converged);
  CHECK(cmp.fw.converged);
  CHECK(std::abs(cmp.umst_objective - cmp.fw_objective) <= cmp.tolerance);
}

TEST_CASE("invalid options") {
  const Network net = two_bpr_routes();
  FwOptions opt;
  opt.eps_rel = 0.0;
  CHECK_THROWS_AS(fw_run(net, single(0, 1, 1.0), opt), InvalidArgument);
  CHECK_THROWS_AS(fw_run(net, single(1, 0, 1.0), FwOptions{}), UnreachableError);
}
