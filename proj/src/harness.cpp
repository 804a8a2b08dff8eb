#include "zoht/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

namespace zoht {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string exact(double v) { return fmt("%.17g", v); }

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ",") + fmt("%g", x);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << body;
  out.flush();
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string trimmed(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

template <class T>
bool parse_exact(const std::string& s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

// ---------------------------------------------------------------------------
// Names and parsing
// ---------------------------------------------------------------------------

std::string_view to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::RidgeSynthetic:
      return "ridge-synthetic";
    case ProblemKind::RidgeCsv:
      return "ridge-csv";
    case ProblemKind::AttackSurrogate:
      return "attack-surrogate";
  }
  return "unknown";
}

std::string_view to_string(SelectRule r) { return r == SelectRule::Final ? "final" : "min"; }

SelectRule parse_select_rule(std::string_view s) {
  if (s == "final") return SelectRule::Final;
  if (s == "min") return SelectRule::Min;
  throw DomainError("unknown selection rule '" + std::string(s) + "' (expected final or min)");
}

std::string_view to_string(Axis a) { return a == Axis::Izo ? "izo" : "nht"; }

AlgorithmChoice parse_algorithm_choice(std::string_view name, UpdateLaw pm_law, std::size_t pm_p) {
  if (name == "fgzoht") return {"fgzoht", Algorithm::Fgzoht};
  if (name == "szoht") return {"szoht", Algorithm::Szoht};
  if (name == "vr" || name == "vr-szht") return {"vr-szht", Algorithm::VrSzht};
  if (name == "sarah" || name == "sarah-szht") return {"sarah-szht", Algorithm::SarahSzht};
  if (name == "saga" || name == "saga-szht") return {"saga-szht", Algorithm::PmSzht, UpdateLaw::PSaga, 1};
  if (name == "pm" || name == "pm-szht") return {"pm-szht", Algorithm::PmSzht, pm_law, pm_p};
  throw DomainError("unknown algorithm '" + std::string(name) +
                    "' (expected fgzoht, szoht, vr, saga, sarah or pm)");
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trimmed(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    if (piece.empty()) throw DomainError("empty entry in list '" + std::string(text) + "'");
    out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& piece : split_list(text)) {
    double v = 0.0;
    if (!parse_exact(piece, v)) throw DomainError("not a number: '" + piece + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  for (const auto& piece : split_list(text)) {
    std::uint64_t v = 0;
    if (!parse_exact(piece, v)) throw DomainError("not a non-negative integer: '" + piece + "'");
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Problems and specs
// ---------------------------------------------------------------------------

std::shared_ptr<const FunctionOracle> build_problem(const ProblemSpec& spec, std::uint64_t seed) {
  RngStream rng(seed, streams::kDataGen);
  switch (spec.kind) {
    case ProblemKind::RidgeSynthetic:
      return std::make_shared<RidgeProblem>(
          ridge_synthetic(spec.n, spec.d, spec.lambda, rng, RidgeSyntheticOptions{spec.sparsity}));
    case ProblemKind::RidgeCsv:
      return std::make_shared<RidgeProblem>(ridge_from_csv(spec.csv_path, spec.target_column, spec.lambda));
    case ProblemKind::AttackSurrogate:
      return std::make_shared<CwAttackProblem>(attack_surrogate(spec.n, spec.d, spec.classes, rng));
  }
  throw DomainError("unknown problem kind");
}

void ExperimentSpec::validate() const {
  if (algorithms.empty()) throw DomainError("experiment needs at least one algorithm");
  if (eta_grid.empty()) throw DomainError("experiment needs at least one eta");
  if (seeds.empty()) throw DomainError("experiment needs at least one seed");
  if (threads == 0) throw DomainError("threads must be at least 1");
  std::set<std::string> labels;
  for (const auto& a : algorithms) {
    if (!labels.insert(a.label).second) throw DomainError("algorithm '" + a.label + "' listed twice");
  }
  std::set<double> etas;
  for (double eta : eta_grid) {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta values must be positive and finite");
    if (!etas.insert(eta).second) throw DomainError("eta " + fmt("%g", eta) + " listed twice");
  }
  std::set<std::uint64_t> seen;
  for (auto s : seeds) {
    if (!seen.insert(s).second) throw DomainError("seed " + std::to_string(s) + " listed twice");
  }
}

const Cell& ExperimentResult::cell(const std::string& algorithm, double eta, std::uint64_t seed) const {
  for (const auto& c : cells) {
    if (c.algorithm == algorithm && c.eta == eta && c.seed == seed) return c;
  }
  throw DomainError("no cell (" + algorithm + ", " + fmt("%g", eta) + ", " + std::to_string(seed) + ")");
}

const AlgorithmSummary& ExperimentResult::summary(const std::string& algorithm) const {
  for (const auto& s : summaries) {
    if (s.label == algorithm) return s;
  }
  throw DomainError("no summary for '" + algorithm + "'");
}

// ---------------------------------------------------------------------------
// Selection and aggregation
// ---------------------------------------------------------------------------

double trace_score(const RunTrace& trace, SelectRule rule) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (trace.diverged) return inf;
  double score = trace.final_fval();
  if (rule == SelectRule::Min) {
    score = trace.initial_fval;
    for (const auto& r : trace.rows) score = std::min(score, r.fval);
  }
  return std::isfinite(score) ? score : inf;
}

double select_best_eta(const std::map<double, double>& score_by_eta) {
  if (score_by_eta.empty()) throw DomainError("no eta to select from");
  // map iterates in increasing eta, so strict < keeps the smaller eta on ties
  auto best = score_by_eta.begin();
  for (auto it = score_by_eta.begin(); it != score_by_eta.end(); ++it) {
    if (it->second < best->second) best = it;
  }
  return best->first;
}

AggregateCurve aggregate_traces(const std::vector<const RunTrace*>& traces, Axis axis) {
  AggregateCurve out;
  if (traces.empty()) return out;
  auto x_of = [axis](const TraceRow& r) { return static_cast<double>(axis == Axis::Izo ? r.izo : r.nht); };

  std::vector<double> grid;
  for (const auto* t : traces) {
    for (const auto& r : t->rows) grid.push_back(x_of(r));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  const std::size_t m = traces.size();
  std::vector<std::size_t> cursor(m, 0);
  std::vector<double> current(m);
  for (std::size_t s = 0; s < m; ++s) current[s] = traces[s]->initial_fval;

  for (double x : grid) {
    double sum = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
      const auto& rows = traces[s]->rows;
      while (cursor[s] < rows.size() && x_of(rows[cursor[s]]) <= x) current[s] = rows[cursor[s]++].fval;
      sum += current[s];
    }
    const double mean = sum / static_cast<double>(m);
    double ss = 0.0;
    for (double v : current) ss += (v - mean) * (v - mean);
    out.x.push_back(x);
    out.mean.push_back(mean);
    out.std.push_back(m > 1 ? std::sqrt(ss / static_cast<double>(m - 1)) : 0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

namespace {

/// problems[s] serves seeds[s].
ExperimentResult run_cells(const ExperimentSpec& spec, const std::vector<const FunctionOracle*>& problems) {
  spec.validate();
  ExperimentResult result;
  result.spec = spec;
  std::set<const FunctionOracle*> distinct(problems.begin(), problems.end());
  for (const auto* problem : distinct) {
    if (const auto* ridge = dynamic_cast<const RidgeProblem*>(problem)) {
      for (const auto& w : ridge->warnings()) result.warnings.push_back(w);
    }
  }

  struct Job {
    std::size_t algorithm;
    double eta;
    std::size_t seed_index;
  };
  std::vector<Job> jobs;
  for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
    for (double eta : spec.eta_grid) {
      for (std::size_t s = 0; s < spec.seeds.size(); ++s) jobs.push_back({a, eta, s});
    }
  }

  // configuration errors surface here, before any worker starts
  for (const auto* problem : distinct) {
    for (const auto& alg : spec.algorithms) {
      SolverConfig cfg = spec.base;
      cfg.algorithm = alg.algorithm;
      cfg.law = alg.law;
      cfg.p = alg.p;
      cfg.eta = spec.eta_grid.front();
      cfg.validate(*problem);
    }
  }

  result.cells.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t j = next.fetch_add(1); j < jobs.size(); j = next.fetch_add(1)) {
      const auto& job = jobs[j];
      const auto& alg = spec.algorithms[job.algorithm];
      Cell& cell = result.cells[j];
      cell.algorithm = alg.label;
      cell.eta = job.eta;
      cell.seed = spec.seeds[job.seed_index];
      SolverConfig cfg = spec.base;
      cfg.algorithm = alg.algorithm;
      cfg.law = alg.law;
      cfg.p = alg.p;
      cfg.eta = job.eta;
      cfg.seed = cell.seed;
      try {
        cell.trace = run_solver(*problems[job.seed_index], cfg);
      } catch (const std::exception& e) {
        cell.error = e.what();
        cell.trace.config = cfg;
        cell.trace.diverged = true;
        cell.trace.divergence_report = e.what();
      }
    }
  };
  const std::size_t workers = std::min(spec.threads, jobs.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& alg : spec.algorithms) {
    AlgorithmSummary summary;
    summary.label = alg.label;
    for (double eta : spec.eta_grid) {
      double sum = 0.0;
      for (auto seed : spec.seeds) sum += trace_score(result.cell(alg.label, eta, seed).trace, spec.select);
      summary.score_by_eta[eta] = sum / static_cast<double>(spec.seeds.size());
    }
    summary.best_eta = select_best_eta(summary.score_by_eta);
    std::vector<const RunTrace*> traces;
    for (auto seed : spec.seeds) traces.push_back(&result.cell(alg.label, summary.best_eta, seed).trace);
    summary.by_izo = aggregate_traces(traces, Axis::Izo);
    summary.by_nht = aggregate_traces(traces, Axis::Nht);
    result.summaries.push_back(std::move(summary));
  }

  for (const auto& c : result.cells) {
    if (!c.error.empty()) {
      result.warnings.push_back(c.algorithm + " eta=" + fmt("%g", c.eta) + " seed=" + std::to_string(c.seed) +
                                " failed: " + c.error);
    } else if (c.trace.diverged) {
      result.warnings.push_back(c.algorithm + " eta=" + fmt("%g", c.eta) + " seed=" + std::to_string(c.seed) +
                                " diverged: " + c.trace.divergence_report);
    }
  }
  return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<std::shared_ptr<const FunctionOracle>> owned;
  if (spec.problem.data_seed) {
    owned.push_back(build_problem(spec.problem, *spec.problem.data_seed));
  } else if (spec.problem.kind == ProblemKind::RidgeCsv) {
    owned.push_back(build_problem(spec.problem, 0));  // data-gen is unused
  } else {
    for (auto seed : spec.seeds) owned.push_back(build_problem(spec.problem, seed));
  }
  std::vector<const FunctionOracle*> problems;
  for (std::size_t s = 0; s < spec.seeds.size(); ++s) problems.push_back(owned[owned.size() == 1 ? 0 : s].get());
  return run_cells(spec, problems);
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const FunctionOracle& problem) {
  return run_cells(spec, std::vector<const FunctionOracle*>(spec.seeds.size(), &problem));
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string raw_csv_name(const Cell& cell) {
  return "raw_" + cell.algorithm + "_eta" + fmt("%g", cell.eta) + "_seed" + std::to_string(cell.seed) + ".csv";
}

std::string aggregate_csv_name(const std::string& algorithm) { return "aggregate_" + algorithm + ".csv"; }

std::string format_trace_csv(const std::vector<TraceRow>& rows) {
  std::string out = "izo,nht,fval,nnz\n";
  for (const auto& r : rows) {
    out += std::to_string(r.izo) + "," + std::to_string(r.nht) + "," + exact(r.fval) + "," +
           std::to_string(r.nnz) + "\n";
  }
  return out;
}

std::string format_aggregate_csv(const AggregateCurve& curve) {
  std::string out = "izo,mean_fval,std_fval\n";
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    out += exact(curve.x[i]) + "," + exact(curve.mean[i]) + "," + exact(curve.std[i]) + "\n";
  }
  return out;
}

std::string format_meta(const ExperimentResult& result) {
  const auto& spec = result.spec;
  const auto& b = spec.base;
  std::ostringstream o;
  o << "problem=" << to_string(spec.problem.kind) << "\n";
  switch (spec.problem.kind) {
    case ProblemKind::RidgeSynthetic:
      o << "n=" << spec.problem.n << "\nd=" << spec.problem.d << "\nlambda=" << exact(spec.problem.lambda)
        << "\nsparsity=" << spec.problem.sparsity << "\n";
      break;
    case ProblemKind::RidgeCsv:
      o << "file=" << spec.problem.csv_path.string() << "\ntarget=" << spec.problem.target_column
        << "\nlambda=" << exact(spec.problem.lambda) << "\n";
      break;
    case ProblemKind::AttackSurrogate:
      o << "n=" << spec.problem.n << "\nd=" << spec.problem.d << "\nclasses=" << spec.problem.classes << "\n";
      break;
  }
  if (spec.problem.data_seed) {
    o << "data_seed=" << *spec.problem.data_seed << "\n";
  } else {
    o << "data_seed=per-run\n";
  }
  std::string algos;
  for (const auto& a : spec.algorithms) algos += (algos.empty() ? "" : ",") + a.label;
  o << "algorithms=" << algos << "\n";
  o << "k=" << b.k << "\nq=" << b.zo.q << "\ns2=" << b.zo.s2 << "\nmu=" << exact(b.zo.mu) << "\nm=" << b.m
    << "\n";
  for (const auto& a : spec.algorithms) {
    if (a.algorithm == Algorithm::PmSzht) o << a.label << ".law=" << to_string(a.law) << "\n"
                                            << a.label << ".p=" << a.p << "\n";
  }
  o << "anchor=" << to_string(b.anchor) << "\n";
  o << "shared_directions=" << (b.shared_directions ? "true" : "false") << "\n";
  o << "izo_budget=" << b.izo_budget << "\n";
  o << "record_every=" << b.record_every << "\n";
  o << "eta_grid=" << join_doubles(spec.eta_grid) << "\n";
  std::string seeds;
  for (auto s : spec.seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
  o << "seeds=" << seeds << "\n";
  o << "select=" << to_string(spec.select) << "\n";
  o << "rng=" << kRngAlgorithm << "\n";
  o << "rng_streams=" << streams::kDataGen << "," << streams::kDirections << "," << streams::kIndices << ","
    << streams::kMemorySets << "\n";
  o << "eps_Ic_denominator=d-1\n";
  for (const auto& s : result.summaries) {
    o << s.label << ".best_eta=" << fmt("%g", s.best_eta) << "\n";
    for (const auto& [eta, score] : s.score_by_eta) {
      o << s.label << ".score[" << fmt("%g", eta) << "]=" << exact(score) << "\n";
    }
  }
  for (std::size_t i = 0; i < result.warnings.size(); ++i) o << "warning." << i << "=" << result.warnings[i] << "\n";
  return o.str();
}

std::vector<std::filesystem::path> emit_csv(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& c : result.cells) {
    written.push_back(dir / raw_csv_name(c));
    write_file(written.back(), format_trace_csv(c.trace.rows));
  }
  for (const auto& s : result.summaries) {
    written.push_back(dir / aggregate_csv_name(s.label));
    write_file(written.back(), format_aggregate_csv(s.by_izo));
  }
  written.push_back(dir / kMetaFileName);
  write_file(written.back(), format_meta(result));
  return written;
}

std::vector<TraceRow> parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trimmed(line) != "izo,nht,fval,nnz") {
    throw ParseError("trace csv: expected header 'izo,nht,fval,nnz'", 1, 0);
  }
  std::vector<TraceRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    const auto fields = split_list(line);
    if (fields.size() != 4) throw ParseError("trace csv: expected 4 fields", line_no, 0);
    TraceRow r;
    if (!parse_exact(fields[0], r.izo)) throw ParseError("trace csv: bad izo", line_no, 1);
    if (!parse_exact(fields[1], r.nht)) throw ParseError("trace csv: bad nht", line_no, 2);
    if (!parse_exact(fields[2], r.fval)) throw ParseError("trace csv: bad fval", line_no, 3);
    if (!parse_exact(fields[3], r.nnz)) throw ParseError("trace csv: bad nnz", line_no, 4);
    rows.push_back(r);
  }
  return rows;
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace_csv(buf.str());
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 180.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string coord(double v) { return fmt("%.2f", v); }

}  // namespace

SvgChart render_svg(const ExperimentResult& result, Axis axis) {
  SvgChart chart;
  auto curve_of = [axis](const AlgorithmSummary& s) -> const AggregateCurve& {
    return axis == Axis::Izo ? s.by_izo : s.by_nht;
  };
  auto floor_log = [&chart](double v) {
    if (!(v >= kLogFloor)) {
      chart.floored = true;
      return std::log10(kLogFloor);
    }
    return std::log10(v);
  };

  double x_max = 0.0;
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : result.summaries) {
    const auto& c = curve_of(s);
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      x_max = std::max(x_max, c.x[i]);
      const double lo = floor_log(c.mean[i] - c.std[i]);
      const double mid = floor_log(c.mean[i]);
      const double hi = floor_log(c.mean[i] + c.std[i]);
      y_lo = std::min({y_lo, lo, mid});
      y_hi = std::max({y_hi, hi, mid});
    }
  }
  if (!std::isfinite(y_lo)) {
    y_lo = 0.0;
    y_hi = 1.0;
  }
  double decade_lo = std::floor(y_lo);
  double decade_hi = std::ceil(y_hi);
  if (decade_hi <= decade_lo) {
    decade_lo -= 1.0;
    decade_hi += 1.0;
  }
  chart.x_min = 0.0;
  chart.x_max = x_max;
  const double x_span = x_max > 0.0 ? x_max : 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + plot_w * (x / x_span); };
  auto py = [&](double log_y) { return kTop + plot_h * (1.0 - (log_y - decade_lo) / (decade_hi - decade_lo)); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  o << "<title>fval versus " << (axis == Axis::Izo ? "#IZO" : "#NHT") << "</title>\n";
  o << "<desc>x-range " << exact(chart.x_min) << " " << exact(chart.x_max) << "; y log10 range " << decade_lo << " "
    << decade_hi << "</desc>\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";

  // axes, ticks and grid
  o << "<g stroke=\"#000000\" stroke-width=\"1\" fill=\"none\">\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
    << kTop + plot_h << "\"/>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
    << "\"/>\n";
  o << "</g>\n";
  o << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#000000\">\n";
  for (int t = 0; t <= 5; ++t) {
    const double x = x_span * t / 5.0;
    o << "<line x1=\"" << coord(px(x)) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << coord(px(x)) << "\" y2=\""
      << kTop + plot_h + 5 << "\" stroke=\"#000000\"/>\n";
    o << "<text x=\"" << coord(px(x)) << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">"
      << fmt("%g", x_max > 0.0 ? x : 0.0) << "</text>\n";
  }
  for (double dec = decade_lo; dec <= decade_hi + 0.5; dec += 1.0) {
    o << "<line x1=\"" << kLeft << "\" y1=\"" << coord(py(dec)) << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
      << coord(py(dec)) << "\" stroke=\"#dddddd\"/>\n";
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << coord(py(dec) + 4) << "\" text-anchor=\"end\">1e"
      << static_cast<int>(dec) << "</text>\n";
  }
  o << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
    << (axis == Axis::Izo ? "#IZO" : "#NHT") << "</text>\n";
  o << "<text x=\"20\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
    << kTop + plot_h / 2 << ")\">F(theta)</text>\n";
  o << "</g>\n";

  std::size_t color = 0;
  for (const auto& s : result.summaries) {
    const auto& c = curve_of(s);
    const char* stroke = kPalette[color++ % std::size(kPalette)];
    if (!c.x.empty()) {
      std::string upper;
      std::string lower;
      std::string line;
      for (std::size_t i = 0; i < c.x.size(); ++i) {
        // previous-value curves are drawn as steps
        if (i > 0) {
          line += coord(px(c.x[i])) + "," + coord(py(floor_log(c.mean[i - 1]))) + " ";
          upper += coord(px(c.x[i])) + "," + coord(py(floor_log(c.mean[i - 1] + c.std[i - 1]))) + " ";
        }
        line += coord(px(c.x[i])) + "," + coord(py(floor_log(c.mean[i]))) + " ";
        upper += coord(px(c.x[i])) + "," + coord(py(floor_log(c.mean[i] + c.std[i]))) + " ";
      }
      for (std::size_t i = c.x.size(); i-- > 0;) {
        lower += coord(px(c.x[i])) + "," + coord(py(floor_log(c.mean[i] - c.std[i]))) + " ";
        if (i > 0) lower += coord(px(c.x[i])) + "," + coord(py(floor_log(c.mean[i - 1] - c.std[i - 1]))) + " ";
      }
      o << "<polygon points=\"" << upper << lower << "\" fill=\"" << stroke
        << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
      o << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = kTop + 20.0 * static_cast<double>(color);
    o << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 40
      << "\" y2=\"" << ly << "\" stroke=\"" << stroke << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << kWidth - kRight + 45 << "\" y=\"" << ly + 4
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(s.label) << " (eta "
      << fmt("%g", s.best_eta) << ")</text>\n";
  }
  if (chart.floored) {
    o << "<text x=\"" << kLeft + 5 << "\" y=\"" << kTop - 12
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#b00000\">warning: values below 1e-16 drawn at "
         "1e-16</text>\n";
  }
  o << "</svg>\n";
  chart.document = o.str();
  return chart;
}

std::filesystem::path emit_svg(const ExperimentResult& result, Axis axis, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  const auto path = dir / ("curves_" + std::string(to_string(axis)) + ".svg");
  write_file(path, render_svg(result, axis).document);
  return path;
}

}  // namespace zoht
