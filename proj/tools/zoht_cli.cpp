// zoht: command-line front end for the sparse zeroth-order solvers.
//
// Exit codes: 0 success, 1 usage error, 2 runtime or numeric error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "zoht/harness.hpp"
#include "zoht/theory.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Options shared by the three experiment subcommands.
struct RunOptions {
  std::size_t k = 3;
  std::size_t q = 200;
  double mu = 1e-4;
  std::size_t s2 = 0;  // 0 means s2 = d
  std::size_t m = 10;
  std::size_t p = 1;
  std::string law = "p-saga";
  std::uint64_t budget = 80000;
  std::string seeds = "1,2,3";
  std::string eta_grid = "0.005,0.01,0.05,0.1,0.5";
  std::string algos = "fgzoht,szoht,vr,saga,sarah";
  std::string out;
  std::string select = "final";
  std::string anchor = "last-iterate";
  std::size_t threads = 1;
  std::size_t record_every = 1;
  std::optional<std::uint64_t> data_seed;  // unset: fresh data per run seed
  bool svg = false;
  bool sarah_first_step_raw = false;
};

void add_run_options(CLI::App& sub, RunOptions& o) {
  sub.add_option("--k", o.k, "sparsity level kept by hard thresholding")->capture_default_str();
  sub.add_option("--q", o.q, "random directions per gradient estimate")->capture_default_str();
  sub.add_option("--mu", o.mu, "smoothing radius")->capture_default_str();
  sub.add_option("--s2", o.s2, "support size of each direction (default: d)");
  sub.add_option("--m", o.m, "inner-loop length of vr and sarah")->capture_default_str();
  sub.add_option("--p", o.p, "expected memory refreshes per iteration (pm)")->capture_default_str();
  sub.add_option("--law", o.law, "memory update law of pm: p-saga | svrg-variant")->capture_default_str();
  sub.add_option("--budget", o.budget, "IZO budget per run")->capture_default_str();
  sub.add_option("--seeds", o.seeds, "comma-separated run seeds")->capture_default_str();
  sub.add_option("--eta-grid", o.eta_grid, "comma-separated learning rates")->capture_default_str();
  sub.add_option("--algos", o.algos, "comma-separated: fgzoht,szoht,vr,saga,sarah,pm")->capture_default_str();
  sub.add_option("--out", o.out, "output directory")->required();
  sub.add_option("--select", o.select, "eta selection: final | min")->capture_default_str();
  sub.add_option("--anchor", o.anchor, "vr epoch hand-off: last-iterate | random-inner")->capture_default_str();
  sub.add_option("--threads", o.threads, "worker threads")->capture_default_str();
  sub.add_option("--record-every", o.record_every, "trace row stride in steps")->capture_default_str();
  sub.add_option("--data-seed", o.data_seed, "share one generated problem across runs (default: one per seed)");
  sub.add_flag("--svg", o.svg, "also write curves_izo.svg and curves_nht.svg");
  sub.add_flag("--sarah-first-step-raw", o.sarah_first_step_raw, "skip thresholding on the first sarah step");
}

zoht::ExperimentSpec make_spec(const RunOptions& o, zoht::ProblemSpec problem) {
  zoht::ExperimentSpec spec;
  spec.problem = std::move(problem);
  const auto law = zoht::parse_update_law(o.law);
  for (const auto& name : zoht::split_list(o.algos)) {
    spec.algorithms.push_back(zoht::parse_algorithm_choice(name, law, o.p));
  }
  spec.eta_grid = zoht::parse_double_list(o.eta_grid);
  spec.seeds = zoht::parse_seed_list(o.seeds);
  spec.out_dir = o.out;
  spec.select = zoht::parse_select_rule(o.select);
  spec.threads = o.threads;

  auto& b = spec.base;
  b.k = o.k;
  b.zo.d = spec.problem.d;
  b.zo.q = o.q;
  b.zo.mu = o.mu;
  b.zo.s2 = o.s2 == 0 ? spec.problem.d : o.s2;
  b.m = o.m;
  b.p = o.p;
  b.law = law;
  b.izo_budget = o.budget;
  b.record_every = o.record_every;
  b.sarah_first_step_raw = o.sarah_first_step_raw;
  if (o.anchor == "last-iterate") {
    b.anchor = zoht::AnchorPolicy::LastIterate;
  } else if (o.anchor == "random-inner") {
    b.anchor = zoht::AnchorPolicy::RandomInner;
  } else {
    throw UsageError("unknown anchor policy '" + o.anchor + "'");
  }
  spec.validate();
  return spec;
}

void report(const zoht::ExperimentResult& result, const std::vector<std::filesystem::path>& files) {
  for (const auto& s : result.summaries) {
    std::printf("%-12s best eta %-8g score %.10g\n", s.label.c_str(), s.best_eta, s.score_by_eta.at(s.best_eta));
  }
  for (const auto& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("wrote %zu files to %s\n", files.size(), result.spec.out_dir.string().c_str());
}

int run(const zoht::ExperimentSpec& spec, const zoht::FunctionOracle* fixed_problem, bool svg) {
  const auto result = fixed_problem ? zoht::run_experiment(spec, *fixed_problem) : zoht::run_experiment(spec);
  auto files = zoht::emit_csv(result, spec.out_dir);
  if (svg) {
    for (auto axis : {zoht::Axis::Izo, zoht::Axis::Nht}) {
      const auto chart = zoht::render_svg(result, axis);
      if (chart.floored) std::fprintf(stderr, "warning: values below 1e-16 floored in the %s chart\n",
                                      std::string(zoht::to_string(axis)).c_str());
      files.push_back(zoht::emit_svg(result, axis, spec.out_dir));
    }
  }
  report(result, files);
  return 0;
}

void print_interval(const char* name, const zoht::theory::EtaInterval& iv) {
  std::printf("%s.nonempty %s\n", name, iv.nonempty ? "true" : "false");
  std::printf("%s.lo %.12g\n", name, iv.lo);
  std::printf("%s.hi %.12g\n", name, iv.hi);
  std::printf("%s.discriminant %.12g\n", name, iv.discriminant);
}

int check_theory(const zoht::theory::TheoryParams& tp) {
  namespace th = zoht::theory;
  tp.validate();
  const auto eps = th::epsilon_constants(tp);
  const auto cond = th::szoht_conditions(tp);
  std::printf("s %zu\n", tp.s());
  std::printf("kappa %.12g\n", tp.kappa());
  std::printf("alpha %.12g\n", th::alpha(tp.k, tp.kstar));
  std::printf("eps_mu %.12g\n", eps.eps_mu);
  std::printf("eps_I %.12g\n", eps.eps_I);
  std::printf("eps_Ic %.12g\n", eps.eps_Ic);
  std::printf("eps_abs %.12g\n", eps.eps_abs);
  std::printf("szoht.k_lower %.12g\n", cond.k_lower);
  std::printf("szoht.k_upper %.12g\n", cond.k_upper);
  std::printf("szoht.q_lower %.12g\n", cond.q_lower);
  print_interval("pm_eta", th::pm_eta_interval(tp, eps.eps_I));
  const auto vr = th::vrszht_eta_interval(tp, eps.eps_I);
  print_interval("vr_eta", vr.interval);
  std::printf("vr_eta.recommended %.12g\n", vr.recommended);
  print_interval("sarah_eta", th::sarah_eta_interval(tp, eps.eps_I));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse zeroth-order hard-thresholding solvers"};
  app.require_subcommand(1);

  // ridge-synthetic
  auto* synth = app.add_subcommand("ridge-synthetic", "ridge regression on generated unit-ball data");
  zoht::ProblemSpec synth_problem;
  RunOptions synth_opts;
  synth->add_option("--n", synth_problem.n, "samples")->capture_default_str();
  synth->add_option("--d", synth_problem.d, "dimension")->capture_default_str();
  synth->add_option("--lambda", synth_problem.lambda, "l2 regularization")->capture_default_str();
  synth->add_option("--sparsity", synth_problem.sparsity, "keep only this many entries of theta* (0: dense)");
  add_run_options(*synth, synth_opts);

  // ridge-csv
  auto* csv = app.add_subcommand("ridge-csv", "ridge regression on a CSV file");
  zoht::ProblemSpec csv_problem;
  csv_problem.kind = zoht::ProblemKind::RidgeCsv;
  RunOptions csv_opts;
  csv_opts.eta_grid = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6,1e-7";
  std::optional<std::size_t> csv_m;
  std::optional<std::uint64_t> csv_budget;
  std::string csv_file;
  csv->add_option("--file", csv_file, "CSV with a header row")->required();
  csv->add_option("--target", csv_problem.target_column, "target column name")->required();
  csv->add_option("--lambda", csv_problem.lambda, "l2 regularization")->capture_default_str();
  add_run_options(*csv, csv_opts);
  // m defaults to floor(n/2); the budget to 20 full passes
  csv->get_option("--m")->default_str("floor(n/2)");
  csv->get_option("--budget")->default_str("20 n (q+1)");

  // attack-surrogate
  auto* attack = app.add_subcommand("attack-surrogate", "universal sparse perturbation against a surrogate classifier");
  zoht::ProblemSpec attack_problem;
  attack_problem.kind = zoht::ProblemKind::AttackSurrogate;
  attack_problem.n = 4;
  attack_problem.d = 48;
  RunOptions attack_opts;
  attack_opts.k = 6;
  attack_opts.q = 10;
  attack_opts.mu = 1e-3;
  attack_opts.budget = 600;
  attack_opts.seeds = "1";
  attack_opts.eta_grid = "0.001,0.005,0.01,0.05";
  attack_opts.algos = "szoht";
  attack->add_option("--n", attack_problem.n, "images")->capture_default_str();
  attack->add_option("--d", attack_problem.d, "pixels per image")->capture_default_str();
  attack->add_option("--classes", attack_problem.classes, "classes of the surrogate")->capture_default_str();
  add_run_options(*attack, attack_opts);

  // check-theory
  auto* theory = app.add_subcommand("check-theory", "print the constants and step-size intervals");
  zoht::theory::TheoryParams tp;
  std::optional<std::size_t> tp_p;
  std::optional<std::size_t> tp_m;
  theory->add_option("--d", tp.d)->required();
  theory->add_option("--n", tp.n)->required();
  theory->add_option("--q", tp.q)->required();
  theory->add_option("--s2", tp.s2)->required();
  theory->add_option("--k", tp.k)->required();
  theory->add_option("--kstar", tp.kstar)->required();
  theory->add_option("--rho-plus", tp.rho_plus)->required();
  theory->add_option("--rho-minus", tp.rho_minus)->required();
  theory->add_option("--mu", tp.mu)->required();
  theory->add_option("--p", tp_p);
  theory->add_option("--m", tp_m);

  try {
    app.parse(argc, argv);
    // CLI11 fills optionals only when given; detect explicit --m / --budget on ridge-csv
    if (csv->parsed()) {
      if (csv->count("--m") > 0) csv_m = csv_opts.m;
      if (csv->count("--budget") > 0) csv_budget = csv_opts.budget;
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (theory->parsed()) {
      tp.p = tp_p;
      tp.m = tp_m;
      try {
        tp.validate();
      } catch (const zoht::DomainError& e) {
        throw UsageError(e.what());
      }
      return check_theory(tp);
    }

    zoht::ProblemSpec problem;
    RunOptions opts;
    if (synth->parsed()) {
      problem = synth_problem;
      opts = synth_opts;
    } else if (attack->parsed()) {
      problem = attack_problem;
      opts = attack_opts;
    } else {
      problem = csv_problem;
      problem.csv_path = csv_file;
      opts = csv_opts;
    }
    problem.data_seed = opts.data_seed;

    // build the problem first: ridge-csv derives d, m and budget from it, and
    // the other kinds are checked against the first seed's instance
    const auto seeds = [&] {
      try {
        return zoht::parse_seed_list(opts.seeds);
      } catch (const zoht::DomainError& e) {
        throw UsageError(e.what());
      }
    }();
    const auto oracle = zoht::build_problem(problem, problem.data_seed.value_or(seeds.front()));
    problem.n = oracle->size();
    problem.d = oracle->dim();
    if (csv->parsed()) {
      opts.m = csv_m.value_or(std::max<std::size_t>(1, problem.n / 2));
      opts.budget = csv_budget.value_or(20 * problem.n * (opts.q + 1));
    }

    zoht::ExperimentSpec spec;
    try {
      spec = make_spec(opts, problem);
      for (const auto& alg : spec.algorithms) {
        auto cfg = spec.base;
        cfg.algorithm = alg.algorithm;
        cfg.p = alg.p;
        cfg.validate(*oracle);
      }
    } catch (const zoht::DomainError& e) {
      throw UsageError(e.what());
    }
    const bool shared_problem = csv->parsed() || problem.data_seed.has_value();
    return run(spec, shared_problem ? oracle.get() : nullptr, opts.svg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
