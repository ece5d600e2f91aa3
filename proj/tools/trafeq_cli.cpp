// Command-line front end over the C interface.
//
//   trafeq_cli solve   --net N --trips T [--model beckmann|stable] ...
//   trafeq_cli compare --net N --trips T --out-compare C ...
//
// Exit status: 0 converged, 1 input error, 2 iteration/time cap reached,
// 3 the two solvers disagree.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "trafeq/trafeq.h"

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitInput = 1;
constexpr int kExitCap = 2;
constexpr int kExitDisagree = 3;

struct Args {
  std::string net, trips;
  std::string model = "beckmann";
  std::string gamma = "0";
  std::string walk_cap = "auto";
  double eps_rel = 0.01;
  int max_iters = 100000;
  double time_limit_s = 0.0;
  int threads = 0;
  double r_hat = 0.0;
  std::string out_flows, out_log, out_summary, out_compare;
};

int default_threads() {
  if (const char* env = std::getenv("TRAFFIC_EQ_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    std::fprintf(stderr, "warning: ignoring TRAFFIC_EQ_THREADS=%s\n", env);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("--net", a.net, "TNTP network file")->required();
  cmd->add_option("--trips", a.trips, "TNTP trips file")->required();
  cmd->add_option("--gamma", a.gamma, "entropy weight: number >= 0 or auto");
  cmd->add_option("--eps-rel", a.eps_rel, "relative duality-gap target")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--walk-cap", a.walk_cap, "walk length cap H: integer or auto");
  cmd->add_option("--max-iters", a.max_iters, "iteration cap")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--time-limit-s", a.time_limit_s, "wall-clock cap, 0 = none")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--threads", a.threads, "oracle threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out-flows", a.out_flows, "flows CSV");
  cmd->add_option("--out-log", a.out_log, "convergence log CSV");
  cmd->add_option("--out-summary", a.out_summary, "summary JSON");
}

bool to_options(const Args& a, trafeq_options& o) {
  trafeq_options_init(&o);
  if (a.model == "beckmann") {
    o.model = TRAFEQ_MODEL_BECKMANN;
  } else if (a.model == "stable") {
    o.model = TRAFEQ_MODEL_STABLE;
  } else {
    std::fprintf(stderr, "error: --model must be beckmann or stable\n");
    return false;
  }
  if (a.gamma == "auto") {
    o.gamma_auto = 1;
  } else {
    try {
      size_t used = 0;
      o.gamma = std::stod(a.gamma, &used);
      if (used != a.gamma.size() || !(o.gamma >= 0.0)) throw std::exception();
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: --gamma must be a number >= 0 or auto\n");
      return false;
    }
  }
  if (a.walk_cap != "auto") {
    try {
      size_t used = 0;
      o.walk_cap = std::stoi(a.walk_cap, &used);
      if (used != a.walk_cap.size() || o.walk_cap < 1) throw std::exception();
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: --walk-cap must be a positive integer or auto\n");
      return false;
    }
  }
  o.eps_rel = a.eps_rel;
  o.max_iters = a.max_iters;
  o.time_limit_s = a.time_limit_s;
  o.threads = a.threads > 0 ? a.threads : default_threads();
  o.r_hat = a.r_hat;
  return true;
}

bool check(trafeq_status s) {
  if (s == TRAFEQ_OK) return true;
  std::fprintf(stderr, "error: %s\n", trafeq_last_error());
  return false;
}

struct Instance {
  trafeq_network* net = nullptr;
  trafeq_demand* dm = nullptr;
  ~Instance() {
    trafeq_demand_free(dm);
    trafeq_network_free(net);
  }
};

bool load(const Args& a, Instance& inst) {
  return check(trafeq_network_load(a.net.c_str(), &inst.net)) &&
         check(trafeq_demand_load(a.trips.c_str(), &inst.dm));
}

bool write_solution(const Args& a, const trafeq_solution* sol,
                    const trafeq_network* net) {
  if (!a.out_flows.empty() &&
      !check(trafeq_solution_write_flows(sol, net, a.out_flows.c_str())))
    return false;
  if (!a.out_log.empty() &&
      !check(trafeq_solution_write_log(sol, a.out_log.c_str())))
    return false;
  return true;
}

int run_solve(const Args& a) {
  trafeq_options o;
  if (!to_options(a, o)) return kExitInput;
  Instance inst;
  if (!load(a, inst)) return kExitInput;
  trafeq_solution* sol = nullptr;
  if (!check(trafeq_solve(inst.net, inst.dm, &o, &sol))) return kExitInput;
  bool ok = write_solution(a, sol, inst.net);
  if (ok && !a.out_summary.empty())
    ok = check(trafeq_solution_write_summary(sol, a.net.c_str(),
                                             a.trips.c_str(),
                                             a.out_summary.c_str()));
  const bool converged = trafeq_solution_converged(sol);
  const double gap0 = trafeq_solution_gap0(sol);
  std::printf("model=%s gamma=%.17g iterations=%d gap=%.6e rel_gap=%.6e "
              "violation=%.6e converged=%d\n",
              a.model.c_str(), trafeq_solution_gamma(sol),
              trafeq_solution_iterations(sol), trafeq_solution_gap(sol),
              gap0 > 0.0 ? trafeq_solution_gap(sol) / gap0 : 0.0,
              trafeq_solution_violation(sol), converged ? 1 : 0);
  trafeq_solution_free(sol);
  if (!ok) return kExitInput;
  return converged ? kExitConverged : kExitCap;
}

int run_compare(const Args& a) {
  trafeq_options o;
  if (!to_options(a, o)) return kExitInput;
  if (o.gamma_auto || o.gamma != 0.0) {
    std::fprintf(stderr, "error: compare runs Beckmann with gamma = 0 only\n");
    return kExitInput;
  }
  Instance inst;
  if (!load(a, inst)) return kExitInput;
  trafeq_comparison* cmp = nullptr;
  if (!check(trafeq_compare(inst.net, inst.dm, &o, &cmp))) return kExitInput;
  bool ok = write_solution(a, trafeq_comparison_umst(cmp), inst.net);
  if (ok && !a.out_compare.empty())
    ok = check(trafeq_comparison_write_csv(cmp, a.out_compare.c_str()));
  if (ok && !a.out_summary.empty())
    ok = check(trafeq_comparison_write_summary(cmp, a.net.c_str(),
                                               a.trips.c_str(),
                                               a.out_summary.c_str()));
  const bool converged = trafeq_comparison_converged(cmp);
  const bool agree = trafeq_comparison_agree(cmp);
  std::printf("umst_objective=%.17g fw_objective=%.17g tolerance=%.6e "
              "converged=%d agree=%d\n",
              trafeq_comparison_umst_objective(cmp),
              trafeq_comparison_fw_objective(cmp),
              trafeq_comparison_tolerance(cmp), converged ? 1 : 0,
              agree ? 1 : 0);
  trafeq_comparison_free(cmp);
  if (!ok) return kExitInput;
  if (!converged) return kExitCap;
  return agree ? kExitConverged : kExitDisagree;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traffic equilibrium via the accelerated dual method"};
  app.require_subcommand(1);
  Args a;

  auto* solve = app.add_subcommand("solve", "solve one model");
  add_common(solve, a);
  solve->add_option("--model", a.model, "beckmann or stable")
      ->check(CLI::IsMember({"beckmann", "stable"}));
  solve->add_option("--r-hat", a.r_hat, "stable dynamics penalty radius, 0 = auto")
      ->check(CLI::NonNegativeNumber);

  auto* compare =
      app.add_subcommand("compare", "dual method vs Frank-Wolfe, Beckmann gamma = 0");
  add_common(compare, a);
  compare->add_option("--out-compare", a.out_compare, "side-by-side CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (compare->parsed()) return run_compare(a);
  return run_solve(a);
}
