#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "trafeq/equilibrium.hpp"
#include "trafeq/frank_wolfe.hpp"
#include "trafeq/network.hpp"

namespace trafeq {

inline constexpr const char* kFlowsHeader =
    "edge_index,tail,head,flow,time,capacity";
inline constexpr const char* kLogHeader =
    "iteration,elapsed_s,A,L,gap,rel_gap,violation,value_calls,gradient_calls,"
    "gap_unpenalized,r_tilde,dual_value";
inline constexpr const char* kCompareHeader =
    "iteration,umst_rel_gap,umst_elapsed_s,fw_rel_gap,fw_elapsed_s";

/// Edge indices and node ids are 1-based as in TNTP.
void write_flows_csv(std::ostream& out, const Network& net,
                     const std::vector<double>& flows,
                     const std::vector<double>& times);
void write_log_csv(std::ostream& out,
                   const std::vector<ConvergenceRecord>& history);
/// Inverse of write_log_csv; throws ParseError on a malformed row.
std::vector<ConvergenceRecord> read_log_csv(std::istream& in,
                                            const std::string& source);

struct RunInputs {
  std::string net_path;
  std::string trips_path;
  std::string gamma_arg;  // as given: a number or "auto"
  std::string walk_cap_arg;
};

/// Echoes every parameter used together with the outcome, as JSON.
std::string summary_json(const RunInputs& inputs, const EquilibriumSolution& sol);
std::string compare_summary_json(const RunInputs& inputs,
                                 const CompareResult& cmp);

/// Row i holds iteration i of both methods; a method that stopped earlier
/// leaves its cells empty.
void write_compare_csv(std::ostream& out, const CompareResult& cmp);

/// Writes to path via a temporary file; throws Error on I/O failure.
void write_file(const std::string& path, const std::string& contents);

}  // namespace trafeq
