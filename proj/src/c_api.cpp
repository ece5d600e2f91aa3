#include "trafeq/trafeq.h"

#include <algorithm>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "trafeq/equilibrium.hpp"
#include "trafeq/error.hpp"
#include "trafeq/frank_wolfe.hpp"
#include "trafeq/network.hpp"
#include "trafeq/report.hpp"

struct trafeq_network {
  trafeq::Network net;
};
struct trafeq_demand {
  trafeq::DemandMatrix dm;
};
struct trafeq_solution {
  trafeq::EquilibriumSolution sol;
};
struct trafeq_comparison {
  trafeq::CompareResult cmp;
  trafeq_solution umst;
};

namespace {

thread_local std::string g_last_error;

trafeq_status fail(trafeq_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class Fn>
trafeq_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return TRAFEQ_OK;
  } catch (const trafeq::ParseError& e) {
    return fail(TRAFEQ_ERR_PARSE, e.what());
  } catch (const trafeq::UnreachableError& e) {
    return fail(TRAFEQ_ERR_UNREACHABLE, e.what());
  } catch (const trafeq::InvalidArgument& e) {
    return fail(TRAFEQ_ERR_INVALID_ARGUMENT, e.what());
  } catch (const trafeq::NumericalError& e) {
    return fail(TRAFEQ_ERR_NUMERICAL, e.what());
  } catch (const trafeq::Error& e) {
    return fail(TRAFEQ_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TRAFEQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TRAFEQ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TRAFEQ_ERR_INTERNAL, "unknown error");
  }
}

bool readable(const char* path) {
  std::ifstream in(path);
  return static_cast<bool>(in);
}

trafeq::ModelSpec to_spec(const trafeq_options& o) {
  trafeq::ModelSpec spec;
  switch (o.model) {
    case TRAFEQ_MODEL_BECKMANN:
      spec.cost = trafeq::CostModel::Beckmann;
      break;
    case TRAFEQ_MODEL_STABLE:
      spec.cost = trafeq::CostModel::StableDynamics;
      break;
    default:
      throw trafeq::InvalidArgument("unknown model");
  }
  spec.gamma = o.gamma;
  spec.gamma_mode =
      o.gamma_auto ? trafeq::GammaMode::Auto : trafeq::GammaMode::Explicit;
  if (o.walk_cap < 0) throw trafeq::InvalidArgument("walk cap must be >= 0");
  if (o.max_iters < 0) throw trafeq::InvalidArgument("max iterations must be >= 0");
  if (o.time_limit_s < 0.0)
    throw trafeq::InvalidArgument("time limit must be >= 0");
  if (o.threads < 1) throw trafeq::InvalidArgument("threads must be >= 1");
  if (o.r_hat < 0.0) throw trafeq::InvalidArgument("r_hat must be >= 0");
  spec.walk_cap = o.walk_cap;
  spec.eps_rel = o.eps_rel;
  spec.max_iters = o.max_iters;
  spec.time_limit_s = o.time_limit_s;
  spec.threads = o.threads;
  spec.r_hat = o.r_hat;
  return spec;
}

trafeq::RunInputs run_inputs(const trafeq::ModelSpec& spec,
                             const char* net_path, const char* trips_path) {
  trafeq::RunInputs in;
  in.net_path = net_path ? net_path : "";
  in.trips_path = trips_path ? trips_path : "";
  if (spec.gamma_mode == trafeq::GammaMode::Auto) {
    in.gamma_arg = "auto";
  } else {
    std::ostringstream s;
    s.precision(17);
    s << spec.gamma;
    in.gamma_arg = s.str();
  }
  in.walk_cap_arg = spec.walk_cap > 0 ? std::to_string(spec.walk_cap) : "auto";
  return in;
}

size_t copy_out(const std::vector<double>& v, double* buffer, size_t n) {
  if (buffer) std::copy_n(v.begin(), std::min(n, v.size()), buffer);
  return v.size();
}

template <class Fn>
trafeq_status write_with(const char* path, Fn&& fill) {
  if (!path) return fail(TRAFEQ_ERR_INVALID_ARGUMENT, "null output path");
  return guarded([&] {
    std::ostringstream out;
    fill(out);
    trafeq::write_file(path, out.str());
  });
}

}  // namespace

extern "C" {

const char* trafeq_last_error(void) { return g_last_error.c_str(); }

void trafeq_options_init(trafeq_options* options) {
  if (!options) return;
  options->model = TRAFEQ_MODEL_BECKMANN;
  options->gamma = 0.0;
  options->gamma_auto = 0;
  options->walk_cap = 0;
  options->eps_rel = 0.01;
  options->max_iters = 100000;
  options->time_limit_s = 0.0;
  options->threads = 1;
  options->r_hat = 0.0;
}

trafeq_status trafeq_network_load(const char* path, trafeq_network** out) {
  if (!path || !out) return fail(TRAFEQ_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  if (!readable(path))
    return fail(TRAFEQ_ERR_IO, std::string(path) + ": cannot open file");
  return guarded([&] {
    auto* h = new trafeq_network{trafeq::parse_tntp_net_file(path)};
    *out = h;
  });
}

void trafeq_network_free(trafeq_network* net) { delete net; }

int trafeq_network_node_count(const trafeq_network* net) {
  return net ? net->net.node_count() : 0;
}

int trafeq_network_edge_count(const trafeq_network* net) {
  return net ? net->net.edge_count() : 0;
}

trafeq_status trafeq_demand_load(const char* path, trafeq_demand** out) {
  if (!path || !out) return fail(TRAFEQ_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  if (!readable(path))
    return fail(TRAFEQ_ERR_IO, std::string(path) + ": cannot open file");
  return guarded([&] {
    auto* h = new trafeq_demand{trafeq::parse_tntp_trips_file(path)};
    *out = h;
  });
}

void trafeq_demand_free(trafeq_demand* dm) { delete dm; }

double trafeq_demand_total(const trafeq_demand* dm) {
  return dm ? dm->dm.total() : 0.0;
}

trafeq_status trafeq_solve(const trafeq_network* net, const trafeq_demand* dm,
                           const trafeq_options* options,
                           trafeq_solution** out) {
  if (!net || !dm || !options || !out)
    return fail(TRAFEQ_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto* h = new trafeq_solution{
        trafeq::solve(net->net, dm->dm, to_spec(*options))};
    *out = h;
  });
}

void trafeq_solution_free(trafeq_solution* sol) { delete sol; }

int trafeq_solution_converged(const trafeq_solution* sol) {
  return sol && sol->sol.converged ? 1 : 0;
}
int trafeq_solution_iterations(const trafeq_solution* sol) {
  return sol ? sol->sol.iterations : 0;
}
double trafeq_solution_gap(const trafeq_solution* sol) {
  return sol ? sol->sol.gap : 0.0;
}
double trafeq_solution_gap0(const trafeq_solution* sol) {
  return sol ? sol->sol.gap0 : 0.0;
}
double trafeq_solution_gamma(const trafeq_solution* sol) {
  return sol ? sol->sol.gamma : 0.0;
}
double trafeq_solution_violation(const trafeq_solution* sol) {
  return sol ? sol->sol.violation : 0.0;
}
double trafeq_solution_primal_objective(const trafeq_solution* sol) {
  return sol ? sol->sol.primal_objective : 0.0;
}
size_t trafeq_solution_flows(const trafeq_solution* sol, double* buffer,
                             size_t n) {
  return sol ? copy_out(sol->sol.flows, buffer, n) : 0;
}
size_t trafeq_solution_times(const trafeq_solution* sol, double* buffer,
                             size_t n) {
  return sol ? copy_out(sol->sol.times, buffer, n) : 0;
}

trafeq_status trafeq_solution_write_flows(const trafeq_solution* sol,
                                          const trafeq_network* net,
                                          const char* path) {
  if (!sol || !net) return fail(TRAFEQ_ERR_INVALID_ARGUMENT, "null argument");
  if (static_cast<int>(sol->sol.flows.size()) != net->net.edge_count())
    return fail(TRAFEQ_ERR_INVALID_ARGUMENT,
                "solution does not belong to this network");
  return write_with(path, [&](std::ostream& out) {
    trafeq::write_flows_csv(out, net->net, sol->sol.flows, sol->sol.times);
  });
}

trafeq_status trafeq_solution_write_log(const trafeq_solution* sol,
                                        const char* path) {
  if (!sol) return fail(TRAFEQ_ERR_INVALID_ARGUMENT, "null argument");
  return write_with(path, [&](std::ostream& out) {
    trafeq::write_log_csv(out, sol->sol.history);
  });
}

trafeq_status trafeq_solution_write_summary(const trafeq_solution* sol,
                                            const char* net_path,
                                            const char* trips_path,
                                            const char* path) {
  if (!sol) return fail(TRAFEQ_ERR_INVALID_ARGUMENT, "null argument");
  return write_with(path, [&](std::ostream& out) {
    out << trafeq::summary_json(run_inputs(sol->sol.spec, net_path, trips_path),
                                sol->sol);
  });
}

trafeq_status trafeq_compare(const trafeq_network* net, const trafeq_demand* dm,
                             const trafeq_options* options,
                             trafeq_comparison** out) {
  if (!net || !dm || !options || !out)
    return fail(TRAFEQ_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto* h = new trafeq_comparison;
    try {
      h->cmp = trafeq::compare_solvers(net->net, dm->dm, to_spec(*options));
    } catch (...) {
      delete h;
      throw;
    }
    h->umst.sol = h->cmp.umst;
    *out = h;
  });
}

void trafeq_comparison_free(trafeq_comparison* cmp) { delete cmp; }

int trafeq_comparison_agree(const trafeq_comparison* cmp) {
  return cmp && cmp->cmp.agree ? 1 : 0;
}
int trafeq_comparison_converged(const trafeq_comparison* cmp) {
  return cmp && cmp->cmp.umst.converged && cmp->cmp.fw.converged ? 1 : 0;
}
double trafeq_comparison_umst_objective(const trafeq_comparison* cmp) {
  return cmp ? cmp->cmp.umst_objective : 0.0;
}
double trafeq_comparison_fw_objective(const trafeq_comparison* cmp) {
  return cmp ? cmp->cmp.fw_objective : 0.0;
}
double trafeq_comparison_tolerance(const trafeq_comparison* cmp) {
  return cmp ? cmp->cmp.tolerance : 0.0;
}
const trafeq_solution* trafeq_comparison_umst(const trafeq_comparison* cmp) {
  return cmp ? &cmp->umst : nullptr;
}

trafeq_status trafeq_comparison_write_csv(const trafeq_comparison* cmp,
                                          const char* path) {
  if (!cmp) return fail(TRAFEQ_ERR_INVALID_ARGUMENT, "null argument");
  return write_with(path, [&](std::ostream& out) {
    trafeq::write_compare_csv(out, cmp->cmp);
  });
}

trafeq_status trafeq_comparison_write_summary(const trafeq_comparison* cmp,
                                              const char* net_path,
                                              const char* trips_path,
                                              const char* path) {
  if (!cmp) return fail(TRAFEQ_ERR_INVALID_ARGUMENT, "null argument");
  return write_with(path, [&](std::ostream& out) {
    out << trafeq::compare_summary_json(
        run_inputs(cmp->cmp.umst.spec, net_path, trips_path), cmp->cmp);
  });
}

}  // extern "C"
