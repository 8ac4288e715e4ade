#pragma once

#include <map>
#include <string>
#include <vector>

#include "ipld/applications.hpp"
#include "ipld/path_following.hpp"

namespace ipld {

/// Whitespace-separated "u v" per line; further columns are ignored.
/// Lines starting with '%' or '#' and blank lines are skipped. Ids are
/// 1-based when the smallest id is >= 1 and 0-based otherwise. Duplicate
/// edges collapse; self-loops are dropped with a warning.
Network parse_edge_list(const std::string& path, std::vector<std::string>* warnings = nullptr);
Network parse_edge_list_text(const std::string& text, std::vector<std::string>* warnings = nullptr);

/// Header "m M", then per channel a (m), c (m), g (m), H (m x m row-major),
/// then optionally b (m) and L. Missing b and L default to 0.3 M L and 1.
DslData read_dsl(const std::string& path);
DslData parse_dsl_text(const std::string& text);
void write_dsl(const std::string& path, const DslData& data);

/// Summary of one solver run as stored on disk.
struct RunResult {
  std::string solver;   ///< "ipld" or "cp"
  std::string problem;  ///< "num" or "dsl"
  std::string status;
  bool converged = false;
  double objective = 0.0;
  double feasibility = 0.0;
  double relative_gap = 0.0;
  long long iterations = 0;
  long long phase1_iterations = 0;
  double wall_ms = 0.0;
  Certificate certificate;
  bool has_certificate = false;
  std::map<std::string, std::string> config;  ///< flag echo
  std::string trace_path;

  bool operator==(const RunResult& other) const;
};

RunResult make_run_result(const SolveResult& result, const std::string& problem);

std::string result_to_json(const RunResult& result, bool include_timing = true);
RunResult result_from_json(const std::string& text);
void write_result(const std::string& path, const RunResult& result);
/// A JSON array of results.
void write_results(const std::string& path, const std::vector<RunResult>& results);
RunResult read_result(const std::string& path);

/// CSV header k,t,lambda,slave_resid,inner_iters,primal_opt,dual_resid,wall_ms;
/// one row per main-loop iteration, 17 significant digits.
void write_trace(const std::string& path, const std::vector<IterationRecord>& trace);
std::string trace_to_csv(const std::vector<IterationRecord>& trace);

/// Parsed numeric CSV (header kept separately).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& path);

/// %.17g formatting.
std::string format_double(double v);

}  // namespace ipld
