#include "ipld/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <sstream>

#include "ipld/errors.hpp"

namespace ipld {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

bool parse_id(const std::string& token, long long& value) {
  std::size_t used = 0;
  try {
    value = std::stoll(token, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == token.size() && value >= 0;
}

// Non-finite values are stored as strings since JSON has no literal for them.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double number_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw ConfigError("result: bad numeric field '" + s + "'");
}

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Edge lists

Network parse_edge_list_text(const std::string& text, std::vector<std::string>* warnings) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<long long, long long>> raw;
  long long min_id = std::numeric_limits<long long>::max();
  long long max_id = -1;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '%' || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string a;
    std::string b;
    long long u = 0;
    long long v = 0;
    if (!(fields >> a >> b) || !parse_id(a, u) || !parse_id(b, v)) {
      throw ConfigError("edge list line " + std::to_string(line_no) + ": malformed '" + line + "'");
    }
    if (u == v) {
      if (warnings) {
        warnings->push_back("edge list line " + std::to_string(line_no) + ": self-loop dropped");
      }
      continue;
    }
    raw.emplace_back(u, v);
    min_id = std::min({min_id, u, v});
    max_id = std::max({max_id, u, v});
  }
  if (raw.empty()) return make_network(0, {});
  const long long shift = min_id >= 1 ? 1 : 0;
  const long long nodes = max_id - shift + 1;
  if (nodes > std::numeric_limits<int>::max()) throw ConfigError("edge list: too many nodes");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(raw.size());
  for (const auto& [u, v] : raw) {
    edges.emplace_back(static_cast<int>(u - shift), static_cast<int>(v - shift));
  }
  return make_network(static_cast<int>(nodes), edges);
}

Network parse_edge_list(const std::string& path, std::vector<std::string>* warnings) {
  return parse_edge_list_text(read_file(path), warnings);
}

// ---------------------------------------------------------------------------
// DSL text format

DslData parse_dsl_text(const std::string& text) {
  std::istringstream in(text);
  DslData data;
  if (!(in >> data.m >> data.M) || data.m < 1 || data.M < 1) {
    throw ConfigError("dsl: header must be 'm M' with positive integers");
  }
  auto read_vec = [&](int n, const char* what, int channel) {
    Vec v(n);
    for (int k = 0; k < n; ++k) {
      if (!(in >> v[k])) {
        throw ConfigError("dsl: channel " + std::to_string(channel) + ": cannot read " + what);
      }
    }
    return v;
  };
  for (int i = 0; i < data.M; ++i) {
    data.a.push_back(read_vec(data.m, "a", i));
    data.c.push_back(read_vec(data.m, "c", i));
    data.g.push_back(read_vec(data.m, "g", i));
    const Vec flat = read_vec(data.m * data.m, "H", i);
    data.H.push_back(Eigen::Map<const Eigen::Matrix<double, -1, -1, Eigen::RowMajor>>(
        flat.data(), data.m, data.m));
  }
  double first = 0.0;
  if (in >> first) {
    Vec b(data.m);
    b[0] = first;
    for (int k = 1; k < data.m; ++k) {
      if (!(in >> b[k])) throw ConfigError("dsl: cannot read b");
    }
    data.b = b;
    if (!(in >> data.L)) throw ConfigError("dsl: cannot read L");
  } else {
    data.L = 1.0;
    data.b = Vec::Constant(data.m, 0.3 * data.M * data.L);
  }
  data.validate();
  return data;
}

DslData read_dsl(const std::string& path) { return parse_dsl_text(read_file(path)); }

void write_dsl(const std::string& path, const DslData& data) {
  data.validate();
  std::ostringstream out;
  out << data.m << ' ' << data.M << '\n';
  auto put = [&](const Vec& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) out << (k ? " " : "") << format_double(v[k]);
    out << '\n';
  };
  for (std::size_t i = 0; i < static_cast<std::size_t>(data.M); ++i) {
    put(data.a[i]);
    put(data.c[i]);
    put(data.g[i]);
    for (Eigen::Index r = 0; r < data.H[i].rows(); ++r) put(data.H[i].row(r).transpose());
  }
  put(data.b);
  out << format_double(data.L) << '\n';
  write_file(path, out.str());
}

// ---------------------------------------------------------------------------
// Results

bool RunResult::operator==(const RunResult& o) const {
  const Certificate& a = certificate;
  const Certificate& b = o.certificate;
  return solver == o.solver && problem == o.problem && status == o.status &&
         converged == o.converged && same(objective, o.objective) &&
         same(feasibility, o.feasibility) && same(relative_gap, o.relative_gap) &&
         iterations == o.iterations && phase1_iterations == o.phase1_iterations &&
         same(wall_ms, o.wall_ms) && has_certificate == o.has_certificate && same(a.t, b.t) &&
         same(a.primal_opt, b.primal_opt) && same(a.bound_primal, b.bound_primal) &&
         same(a.dual_resid_e, b.dual_resid_e) && same(a.dual_resid_r, b.dual_resid_r) &&
         same(a.bound_dual, b.bound_dual) && a.interior == b.interior && config == o.config &&
         trace_path == o.trace_path;
}

RunResult make_run_result(const SolveResult& result, const std::string& problem) {
  RunResult r;
  r.solver = "ipld";
  r.problem = problem;
  r.status = to_string(result.status);
  r.converged = result.converged();
  r.objective = result.objective;
  r.feasibility = result.feasibility;
  r.relative_gap = result.relative_gap;
  r.iterations = static_cast<long long>(result.trace.size());
  r.phase1_iterations = result.phase1.iterations;
  r.wall_ms = result.wall_ms;
  r.certificate = result.certificate;
  r.has_certificate = true;
  return r;
}

namespace {

json to_json(const RunResult& r, bool include_timing) {
  json j;
  j["solver"] = r.solver;
  j["problem"] = r.problem;
  j["status"] = r.status;
  j["converged"] = r.converged;
  j["objective"] = number(r.objective);
  j["feasibility"] = number(r.feasibility);
  j["relative_gap"] = number(r.relative_gap);
  j["iterations"] = r.iterations;
  j["phase1_iterations"] = r.phase1_iterations;
  if (include_timing) j["wall_ms"] = number(r.wall_ms);
  if (r.has_certificate) {
    const Certificate& c = r.certificate;
    j["certificate"] = {{"t", number(c.t)},
                        {"primal_opt", number(c.primal_opt)},
                        {"bound_primal", number(c.bound_primal)},
                        {"dual_resid_e", number(c.dual_resid_e)},
                        {"dual_resid_r", number(c.dual_resid_r)},
                        {"bound_dual", number(c.bound_dual)},
                        {"interior", c.interior}};
  }
  j["config"] = r.config;
  j["trace"] = r.trace_path;
  return j;
}

RunResult from_json(const json& j) {
  RunResult r;
  r.solver = j.at("solver").get<std::string>();
  r.problem = j.at("problem").get<std::string>();
  r.status = j.at("status").get<std::string>();
  r.converged = j.at("converged").get<bool>();
  r.objective = number_from(j.at("objective"));
  r.feasibility = number_from(j.at("feasibility"));
  r.relative_gap = number_from(j.at("relative_gap"));
  r.iterations = j.at("iterations").get<long long>();
  r.phase1_iterations = j.at("phase1_iterations").get<long long>();
  if (j.contains("wall_ms")) r.wall_ms = number_from(j.at("wall_ms"));
  if (j.contains("certificate")) {
    const json& c = j.at("certificate");
    r.has_certificate = true;
    r.certificate.t = number_from(c.at("t"));
    r.certificate.primal_opt = number_from(c.at("primal_opt"));
    r.certificate.bound_primal = number_from(c.at("bound_primal"));
    r.certificate.dual_resid_e = number_from(c.at("dual_resid_e"));
    r.certificate.dual_resid_r = number_from(c.at("dual_resid_r"));
    r.certificate.bound_dual = number_from(c.at("bound_dual"));
    r.certificate.interior = c.at("interior").get<bool>();
  }
  r.config = j.at("config").get<std::map<std::string, std::string>>();
  r.trace_path = j.at("trace").get<std::string>();
  return r;
}

}  // namespace

std::string result_to_json(const RunResult& result, bool include_timing) {
  return to_json(result, include_timing).dump(2);
}

RunResult result_from_json(const std::string& text) {
  try {
    return from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("result: ") + e.what());
  }
}

void write_result(const std::string& path, const RunResult& result) {
  write_file(path, result_to_json(result) + "\n");
}

void write_results(const std::string& path, const std::vector<RunResult>& results) {
  json arr = json::array();
  for (const auto& r : results) arr.push_back(to_json(r, true));
  write_file(path, arr.dump(2) + "\n");
}

RunResult read_result(const std::string& path) { return result_from_json(read_file(path)); }

// ---------------------------------------------------------------------------
// Traces

std::string trace_to_csv(const std::vector<IterationRecord>& trace) {
  std::string out = "k,t,lambda,slave_resid,inner_iters,primal_opt,dual_resid,wall_ms\n";
  for (const auto& r : trace) {
    out += std::to_string(r.k) + ',' + format_double(r.t) + ',' + format_double(r.lambda) + ',' +
           format_double(r.slave_residual) + ',' + std::to_string(r.inner_iters) + ',' +
           format_double(r.certificate.primal_opt) + ',' +
           format_double(r.certificate.dual_resid_e) + ',' + format_double(r.wall_ms) + '\n';
  }
  return out;
}

void write_trace(const std::string& path, const std::vector<IterationRecord>& trace) {
  write_file(path, trace_to_csv(trace));
}

CsvTable read_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  std::istringstream head(line);
  for (std::string cell; std::getline(head, cell, ',');) table.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    for (std::string cell; std::getline(cells, cell, ',');) row.push_back(std::stod(cell));
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace ipld
