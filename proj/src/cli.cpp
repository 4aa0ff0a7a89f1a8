#include "flexquant/cli.hpp"

#include "flexquant/datagen.hpp"
#include "flexquant/estimators.hpp"
#include "flexquant/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace flexq {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DataOpts {
  std::string data;
  std::string response;
  std::vector<std::string> predictors;
};

struct FlexOpts {
  double c = 0, h = 0, s = 0, v = 0;
  std::vector<CLI::Option*> flags;
};

void add_data_options(CLI::App* cmd, DataOpts& o) {
  cmd->add_option("--data", o.data, "CSV file with a header row")->required();
  cmd->add_option("--response", o.response, "Response column")->required();
  cmd->add_option("--predictors", o.predictors, "Predictor columns (default: all others)")
      ->delimiter(',');
}

void add_flex_options(CLI::App* cmd, FlexOpts& o) {
  o.flags = {cmd->add_option("--c", o.c, "Curvature (method flex)"),
             cmd->add_option("--h", o.h, "Horizontal shift (method flex)"),
             cmd->add_option("--s", o.s, "Slope offset (method flex)"),
             cmd->add_option("--v", o.v, "Vertical shift (method flex)")};
}

FlexCheckParams resolve_flex(const FlexOpts& o, const std::vector<Method>& methods) {
  const bool wants_flex = std::find(methods.begin(), methods.end(), Method::flex) != methods.end();
  const auto given = std::count_if(o.flags.begin(), o.flags.end(),
                                   [](const CLI::Option* f) { return f->count() > 0; });
  if (!wants_flex) {
    if (given > 0) throw UsageError("--c/--h/--s/--v apply only to method flex");
    return FlexCheckParams::srq();
  }
  if (given != 4) throw UsageError("method flex requires all of --c, --h, --s and --v");
  FlexCheckParams p{o.c, o.h, o.s, o.v};
  p.validate();
  return p;
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  if (names.empty()) throw UsageError("no methods given");
  std::vector<Method> out;
  for (const auto& n : names) out.push_back(parse_method(n));
  return out;
}

nlohmann::json params_json(const FlexCheckParams& p) {
  return {{"c", p.c}, {"h", p.h}, {"s", p.s}, {"v", p.v}};
}

Dataset load(const DataOpts& o) {
  return load_csv(o.data, CsvSchema{o.response, o.predictors, ','});
}

void prepare_out_dir(const std::string& dir) {
  if (dir.empty()) throw UsageError("--out must not be empty");
  fs::create_directories(dir);
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Median of integer counts; the mean of the middle pair for even sizes.
double median(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  if (v.size() % 2 == 1) return static_cast<double>(v[k]);
  return 0.5 * static_cast<double>(v[k - 1] + v[k]);
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

enum class Stage { parse, load, compute, write };

struct FitCmd {
  DataOpts data;
  FlexOpts flex;
  double tau = 0.5;
  std::string method;
  bool warm_start = false;
  std::string manifest_path;
};

struct GridCmd {
  DataOpts data;
  FlexOpts flex;
  std::string grid;
  std::vector<std::string> methods;
  bool suppress = false;
  bool warm_start = false;
  bool svg = false;
  std::string out;
};

struct BenchCmd {
  std::string kind = "pareto";
  std::vector<std::size_t> sizes{20, 40, 60, 100, 400};
  std::size_t replicates = 10;
  std::uint64_t seed = 1;
  std::vector<std::string> methods{"rq", "rrq", "srq"};
  std::string grid = "99";
  std::string out;
};

class Runner {
 public:
  Runner(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
      : args_(args), out_(out), err_(err) {}

  int run_fit(const FitCmd& cmd) {
    stage_ = Stage::parse;
    const Tau tau(cmd.tau);
    const Method method = parse_method(cmd.method);
    const FlexCheckParams flex = resolve_flex(cmd.flex, {method});

    stage_ = Stage::load;
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset data = load(cmd.data);

    stage_ = Stage::compute;
    Eigen::VectorXd beta;
    SolveStatus status = SolveStatus::converged;
    std::string note;
    const bool smooth = method == Method::srq || method == Method::smrq || method == Method::flex;
    const FlexCheckParams qs_params = smooth ? params_for(method, flex) : FlexCheckParams::srq();
    if (method == Method::rq) {
      const QuantileFit fit = fit_rq_lp(data, tau);
      beta = fit.beta;
      status = fit.report.status;
    } else if (method == Method::rrq) {
      const RRQModel model = fit_rrq(data, TauGrid({tau.value()}));
      beta = model.plane(0);
      if (model.degenerate_scale) note = "all fitted scales are zero; c set to 0";
      else if (model.negative_scale) note = "some fitted scales are negative";
    } else {
      std::optional<Eigen::VectorXd> init;
      if (cmd.warm_start) init = fit_rq_lp(data, tau).beta;
      const QuantileFit fit = fit_smooth(data, tau, qs_params, init);
      beta = fit.beta;
      status = fit.report.status;
    }

    stage_ = Stage::write;
    const auto& names = data.column_names();
    out_ << "method\t" << to_string(method) << '\n';
    out_ << "tau\t" << format_double(tau.value()) << '\n';
    out_ << "n\t" << data.rows() << '\n';
    for (std::size_t j = 0; j < names.size(); ++j) {
      out_ << "beta\t" << names[j] << '\t' << format_double(beta(static_cast<Eigen::Index>(j)))
           << '\n';
    }
    out_ << "below\t" << count_below(data, beta) << '\n';
    out_ << "Q_C\t" << format_double(classic_total(data, beta, tau)) << '\n';
    out_ << "Q_S\t" << format_double(loss_total(data, beta, tau, qs_params)) << '\t'
         << qs_params.describe() << '\n';
    out_ << "status\t" << to_string(status) << '\n';
    if (!note.empty()) out_ << "note\t" << note << '\n';

    nlohmann::json config{{"command", "fit"},
                          {"data", cmd.data.data},
                          {"response", cmd.data.response},
                          {"predictors", cmd.data.predictors},
                          {"tau", tau.value()},
                          {"method", to_string(method)},
                          {"warm_start", cmd.warm_start}};
    if (method == Method::flex) config["params"] = params_json(flex);
    RunManifest manifest = make_manifest(std::move(config), t0);
    manifest.datasets.push_back(dataset_fingerprint(data, cmd.data.data));
    if (cmd.manifest_path.empty()) {
      out_ << "manifest\t" << manifest.to_json().dump() << '\n';
    } else {
      write_manifest(cmd.manifest_path, manifest);
    }
    return kExitOk;
  }

  int run_grid(const GridCmd& cmd) {
    stage_ = Stage::parse;
    const TauGrid grid = TauGrid::parse(cmd.grid);
    const std::vector<Method> methods = parse_methods(cmd.methods);
    GridOptions options;
    options.params = resolve_flex(cmd.flex, methods);
    options.warm_start = cmd.warm_start;
    prepare_out_dir(cmd.out);

    stage_ = Stage::load;
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset data = load(cmd.data);

    stage_ = Stage::compute;
    std::vector<GridResult> results;
    for (Method m : methods) {
      results.push_back(fit_grid(data, grid, m, options));
      if (cmd.suppress) {
        const GridResult& base = results.back();
        results.push_back(suppress_events(data, base, base.events.value_or(EventReport{})));
      }
    }
    const bool failed = report_failures(results);

    stage_ = Stage::write;
    const fs::path dir(cmd.out);
    write_counts_tsv(dir / "counts.tsv", results);
    write_events_tsv(dir / "events.tsv", results);
    write_coefficients_tsv(dir / "coefficients.tsv", data, results);
    if (cmd.svg) {
      write_curves_svg(dir / "curves.svg", results);
      if (data.cols() == 2) write_lines_svg(dir / "lines.svg", data, results.front());
    }

    nlohmann::json config{{"command", "grid"},
                          {"data", cmd.data.data},
                          {"response", cmd.data.response},
                          {"predictors", cmd.data.predictors},
                          {"grid", cmd.grid},
                          {"taus", grid.size()},
                          {"methods", cmd.methods},
                          {"suppress", cmd.suppress},
                          {"warm_start", cmd.warm_start},
                          {"svg", cmd.svg}};
    if (std::find(methods.begin(), methods.end(), Method::flex) != methods.end()) {
      config["params"] = params_json(options.params);
    }
    RunManifest manifest = make_manifest(std::move(config), t0);
    manifest.datasets.push_back(dataset_fingerprint(data, cmd.data.data));
    write_manifest(dir / "manifest.json", manifest);

    out_ << "quantiles\t" << grid.size() << '\n';
    for (const auto& r : results) {
      out_ << r.method << '\t' << (r.events ? r.events->summary() : "-");
      if (r.events) out_ << "\twide=" << r.events->wide_count();
      if (r.suppressed && !r.suppression_converged) out_ << "\tsuppression did not converge";
      out_ << '\n';
    }
    out_ << "wrote\t" << dir.string() << '\n';
    return failed ? kExitSolver : kExitOk;
  }

  int run_bench(const BenchCmd& cmd) {
    stage_ = Stage::parse;
    const NoiseKind kind = parse_noise_kind(cmd.kind);
    const std::vector<Method> methods = parse_methods(cmd.methods);
    if (std::find(methods.begin(), methods.end(), Method::flex) != methods.end()) {
      throw UsageError("bench does not support method flex");
    }
    if (cmd.sizes.empty()) throw UsageError("--sizes must list at least one size");
    if (cmd.replicates == 0) throw UsageError("--replicates must be positive");
    const TauGrid grid = TauGrid::parse(cmd.grid);
    if (grid.size() < 3) throw UsageError("bench needs a grid of at least 3 taus");
    for (std::size_t n : cmd.sizes) {
      SynthConfig probe;
      probe.n = n;
      probe.kind = kind;
      probe.validate();
    }
    prepare_out_dir(cmd.out);

    stage_ = Stage::compute;
    const auto t0 = std::chrono::steady_clock::now();
    const CounterRng seeder(cmd.seed);
    const fs::path dir(cmd.out);
    std::ostringstream reps;
    reps << "points\treplicate\tseed\tmethod\tspikes\tpulses\twide\tfailures\n";
    std::ostringstream table;
    table << "points";
    for (Method m : methods) table << '\t' << to_string(m);
    table << '\n';

    std::vector<unsigned long long> seeds;
    nlohmann::json datasets = nlohmann::json::array();
    bool failed = false;
    for (std::size_t n : cmd.sizes) {
      std::vector<std::vector<std::size_t>> spikes(methods.size()), pulses(methods.size());
      for (std::size_t r = 0; r < cmd.replicates; ++r) {
        SynthConfig cfg;
        cfg.n = n;
        cfg.kind = kind;
        cfg.seed = seeder.bits(static_cast<std::uint64_t>(n) * 1000003ULL + r);
        seeds.push_back(cfg.seed);
        const Dataset data = generate(cfg);
        datasets.push_back(dataset_fingerprint(
            data, std::string(to_string(kind)) + ":n=" + std::to_string(n) + ":r=" + std::to_string(r)));
        for (std::size_t k = 0; k < methods.size(); ++k) {
          const GridResult res = fit_grid(data, grid, methods[k]);
          failed = report_failures({res}) || failed;
          const std::size_t fails = static_cast<std::size_t>(std::count_if(
              res.statuses.begin(), res.statuses.end(), [](SolveStatus s) { return !is_optimal(s); }));
          const EventReport& ev = *res.events;
          spikes[k].push_back(ev.spike_count());
          pulses[k].push_back(ev.pulse_count());
          reps << n << '\t' << r << '\t' << cfg.seed << '\t' << res.method << '\t'
               << ev.spike_count() << '\t' << ev.pulse_count() << '\t' << ev.wide_count() << '\t'
               << fails << '\n';
        }
      }
      table << n;
      for (std::size_t k = 0; k < methods.size(); ++k) {
        table << '\t' << fmt_g(median(spikes[k])) << '/' << fmt_g(median(pulses[k]));
      }
      table << '\n';
    }

    stage_ = Stage::write;
    write_text(dir / "bench.tsv", table.str());
    write_text(dir / "bench_replicates.tsv", reps.str());
    nlohmann::json config{{"command", "bench"},
                          {"kind", to_string(kind)},
                          {"sizes", cmd.sizes},
                          {"replicates", cmd.replicates},
                          {"seed", cmd.seed},
                          {"methods", cmd.methods},
                          {"grid", cmd.grid},
                          {"replicate_seed", "CounterRng(seed).bits(points * 1000003 + replicate)"}};
    RunManifest manifest = make_manifest(std::move(config), t0);
    manifest.seeds = std::move(seeds);
    manifest.datasets = std::move(datasets);
    write_manifest(dir / "manifest.json", manifest);

    out_ << table.str();
    out_ << "wrote\t" << dir.string() << '\n';
    return failed ? kExitSolver : kExitOk;
  }

  /// Maps an exception escaping a command to its exit code.
  int fail(const std::exception& e) const {
    int code = kExitData;
    if (dynamic_cast<const CsvError*>(&e)) {
      code = kExitData;
    } else if (dynamic_cast<const FitError*>(&e) || dynamic_cast<const SolverError*>(&e)) {
      code = kExitSolver;
    } else if (dynamic_cast<const fs::filesystem_error*>(&e)) {
      code = stage_ == Stage::parse ? kExitUsage : kExitData;
    } else {
      switch (stage_) {
        case Stage::parse: code = kExitUsage; break;
        case Stage::load: code = kExitData; break;
        case Stage::compute: code = kExitSolver; break;
        case Stage::write: code = kExitData; break;
      }
    }
    err_ << "flexquant: error: " << e.what() << '\n';
    return code;
  }

 private:
  RunManifest make_manifest(nlohmann::json config, std::chrono::steady_clock::time_point t0) const {
    RunManifest m;
    m.command_line.push_back("flexquant");
    m.command_line.insert(m.command_line.end(), args_.begin(), args_.end());
    m.config = std::move(config);
    m.started_utc = utc_timestamp();
    m.wall_seconds = elapsed(t0);
    return m;
  }

  // Returns true when some tau has no usable solution.
  bool report_failures(const std::vector<GridResult>& results) const {
    bool hard = false;
    for (const auto& r : results) {
      for (std::size_t k = 0; k < r.failures.size(); ++k) {
        if (r.failures[k].empty()) continue;
        const bool bad = !is_optimal(r.statuses[k]);
        hard = hard || bad;
        err_ << "flexquant: " << (bad ? "error" : "warning") << ": " << r.method
             << " tau=" << format_double(r.grid[k]) << ": " << r.failures[k] << '\n';
      }
    }
    return hard;
  }

  static void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
  }

  const std::vector<std::string>& args_;
  std::ostream& out_;
  std::ostream& err_;
  Stage stage_ = Stage::parse;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantile regression with smooth and classic check functions", "flexquant"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolkitVersion));

  FitCmd fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit one quantile and print the coefficients");
  add_data_options(fit_cmd, fit.data);
  fit_cmd->add_option("--tau", fit.tau, "Quantile level in (0, 1)")->required();
  fit_cmd->add_option("--method", fit.method, "rq, rrq, srq, smrq or flex")->required();
  add_flex_options(fit_cmd, fit.flex);
  fit_cmd->add_flag("--warm-start", fit.warm_start, "Start smooth fits from the LP solution");
  fit_cmd->add_option("--manifest", fit.manifest_path, "Write the run manifest here");

  GridCmd grid;
  auto* grid_cmd = app.add_subcommand("grid", "Fit a tau grid and write count curves and events");
  add_data_options(grid_cmd, grid.data);
  grid_cmd->add_option("--grid", grid.grid, "start,end,step or a count m (tau_i = i/(m+1))")
      ->required();
  grid_cmd->add_option("--methods", grid.methods, "Comma-separated methods")
      ->required()
      ->delimiter(',');
  add_flex_options(grid_cmd, grid.flex);
  grid_cmd->add_flag("--suppress", grid.suppress, "Add a suppressed <method>-s column per method");
  grid_cmd->add_flag("--warm-start", grid.warm_start, "Start each smooth fit from the previous tau");
  grid_cmd->add_flag("--svg", grid.svg, "Also write curves.svg (and lines.svg when p = 2)");
  grid_cmd->add_option("--out", grid.out, "Output directory")->required();

  BenchCmd bench;
  auto* bench_cmd = app.add_subcommand("bench", "Event counts on seeded synthetic replicates");
  bench_cmd->add_option("--kind", bench.kind, "pareto or normal")->capture_default_str();
  bench_cmd->add_option("--sizes", bench.sizes, "Comma-separated sample sizes")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--replicates", bench.replicates, "Replicates per size")
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Base seed")->capture_default_str();
  bench_cmd->add_option("--methods", bench.methods, "Comma-separated methods")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--grid", bench.grid, "Tau grid")->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Runner runner(args, out, err);
  try {
    if (*fit_cmd) return runner.run_fit(fit);
    if (*grid_cmd) return runner.run_grid(grid);
    return runner.run_bench(bench);
  } catch (const std::exception& e) {
    return runner.fail(e);
  }
}

}  // namespace flexq
