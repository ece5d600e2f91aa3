#include "trafeq/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "text_util.hpp"
#include "trafeq/error.hpp"

namespace trafeq {

using detail::shortest_repr;

namespace {

std::vector<std::string_view> split_csv_row(std::string_view line) {
  std::vector<std::string_view> cells;
  size_t start = 0;
  for (;;) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

nlohmann::json spec_json(const RunInputs& inputs, const ModelSpec& spec) {
  nlohmann::json j;
  j["net"] = inputs.net_path;
  j["trips"] = inputs.trips_path;
  j["model"] = to_string(spec.cost);
  j["gamma_arg"] = inputs.gamma_arg;
  j["walk_cap_arg"] = inputs.walk_cap_arg;
  j["eps_rel"] = spec.eps_rel;
  j["max_iters"] = spec.max_iters;
  j["time_limit_s"] = spec.time_limit_s;
  j["threads"] = spec.threads;
  j["r_hat"] = spec.r_hat;
  j["path_count_log"] = spec.path_count_log;
  j["L0"] = spec.L0;
  return j;
}

nlohmann::json solution_json(const EquilibriumSolution& sol) {
  nlohmann::json j;
  j["gamma"] = sol.gamma;
  j["walk_cap"] = sol.walk_cap;
  j["iterations"] = sol.iterations;
  j["gap"] = sol.gap;
  j["gap0"] = sol.gap0;
  j["rel_gap"] = sol.gap0 > 0.0 ? sol.gap / sol.gap0 : 0.0;
  j["violation"] = sol.violation;
  j["primal_objective"] = sol.primal_objective;
  j["dual_value"] = sol.dual_value;
  j["converged"] = sol.converged;
  j["value_calls"] = sol.value_calls;
  j["gradient_calls"] = sol.gradient_calls;
  j["line_search_trials"] = sol.line_search_trials;
  return j;
}

}  // namespace

void write_flows_csv(std::ostream& out, const Network& net,
                     const std::vector<double>& flows,
                     const std::vector<double>& times) {
  out << kFlowsHeader << '\n';
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const Edge& edge = net.edge(e);
    const size_t i = static_cast<size_t>(e);
    out << e + 1 << ',' << Network::external_id(edge.tail) << ','
        << Network::external_id(edge.head) << ',' << shortest_repr(flows[i])
        << ',' << shortest_repr(times[i]) << ',' << shortest_repr(edge.capacity)
        << '\n';
  }
}

void write_log_csv(std::ostream& out,
                   const std::vector<ConvergenceRecord>& history) {
  out << kLogHeader << '\n';
  for (const auto& r : history) {
    out << r.iteration << ',' << shortest_repr(r.elapsed_s) << ','
        << shortest_repr(r.A) << ',' << shortest_repr(r.L) << ','
        << shortest_repr(r.gap) << ',' << shortest_repr(r.rel_gap) << ','
        << shortest_repr(r.violation) << ',' << r.value_calls << ','
        << r.gradient_calls << ',' << shortest_repr(r.gap_unpenalized) << ','
        << shortest_repr(r.r_tilde) << ',' << shortest_repr(r.dual_value)
        << '\n';
  }
}

std::vector<ConvergenceRecord> read_log_csv(std::istream& in,
                                            const std::string& source) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError(source, 0, "empty log");
  ++line_no;
  if (detail::trim(line) != kLogHeader)
    throw ParseError(source, line_no, "unexpected log header");

  std::vector<ConvergenceRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    const auto cells = split_csv_row(row);
    if (cells.size() != 12)
      throw ParseError(source, line_no, "expected 12 columns");
    ConvergenceRecord r;
    long long iteration = 0, values = 0, grads = 0;
    double* reals[] = {&r.elapsed_s, &r.A,       &r.L,
                       &r.gap,       &r.rel_gap, &r.violation};
    bool ok = detail::parse_int(cells[0], iteration);
    for (size_t i = 0; i < 6; ++i)
      ok = ok && detail::parse_double(cells[i + 1], *reals[i]);
    ok = ok && detail::parse_int(cells[7], values) &&
         detail::parse_int(cells[8], grads) &&
         detail::parse_double(cells[9], r.gap_unpenalized) &&
         detail::parse_double(cells[10], r.r_tilde) &&
         detail::parse_double(cells[11], r.dual_value);
    if (!ok) throw ParseError(source, line_no, "malformed log row");
    r.iteration = static_cast<int>(iteration);
    r.value_calls = static_cast<long>(values);
    r.gradient_calls = static_cast<long>(grads);
    out.push_back(r);
  }
  return out;
}

std::string summary_json(const RunInputs& inputs,
                         const EquilibriumSolution& sol) {
  nlohmann::json j;
  j["command"] = "solve";
  j["parameters"] = spec_json(inputs, sol.spec);
  j["result"] = solution_json(sol);
  return j.dump(2) + "\n";
}

std::string compare_summary_json(const RunInputs& inputs,
                                 const CompareResult& cmp) {
  nlohmann::json j;
  j["command"] = "compare";
  j["parameters"] = spec_json(inputs, cmp.umst.spec);
  j["umst"] = solution_json(cmp.umst);
  j["fw"] = {{"iterations", cmp.fw.k},
             {"fw_gap", cmp.fw.fw_gap},
             {"fw_gap0", cmp.fw.fw_gap0},
             {"objective", cmp.fw.objective},
             {"converged", cmp.fw.converged}};
  j["umst_objective"] = cmp.umst_objective;
  j["fw_objective"] = cmp.fw_objective;
  j["tolerance"] = cmp.tolerance;
  j["agree"] = cmp.agree;
  return j.dump(2) + "\n";
}

void write_compare_csv(std::ostream& out, const CompareResult& cmp) {
  out << kCompareHeader << '\n';
  const auto& u = cmp.umst.history;
  const auto& f = cmp.fw.history;
  int last = 0;
  if (!u.empty()) last = std::max(last, u.back().iteration);
  if (!f.empty()) last = std::max(last, f.back().iteration);
  size_t iu = 0, jf = 0;
  for (int k = 0; k <= last; ++k) {
    const bool has_u = iu < u.size() && u[iu].iteration == k;
    const bool has_f = jf < f.size() && f[jf].iteration == k;
    if (!has_u && !has_f) continue;
    out << k << ',';
    if (has_u)
      out << shortest_repr(u[iu].rel_gap) << ',' << shortest_repr(u[iu].elapsed_s);
    else
      out << ',';
    out << ',';
    if (has_f)
      out << shortest_repr(f[jf].rel_gap) << ',' << shortest_repr(f[jf].elapsed_s);
    else
      out << ',';
    out << '\n';
    if (has_u) ++iu;
    if (has_f) ++jf;
  }
}

void write_file(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << contents;
    out.flush();
    if (!out) throw Error("write failed: " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot replace " + path);
  }
}

}  // namespace trafeq
