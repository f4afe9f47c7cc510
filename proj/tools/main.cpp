#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "harness.hpp"

namespace {

using namespace dynkc;
using namespace dynkc::harness;

int usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 2;
}

int run_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 1;
}

struct ParamFlags {
  Params prm;

  void attach(CLI::App* cmd) {
    cmd->add_option("--k", prm.k, "number of centers");
    cmd->add_option("--alpha", prm.alpha, "sample oversampling factor");
    cmd->add_option("--beta", prm.beta, "per-level coverage fraction");
    cmd->add_option("--gamma", prm.gamma, "quantile of the radius lower bound");
    cmd->add_option("--lambda", prm.lambda, "staleness threshold and sync rate");
    cmd->add_option("--epsilon", prm.epsilon, "rebuilder slack");
    cmd->add_option("--delta", prm.delta, "radius ladder step");
    cmd->add_option("--c-work", prm.c_work, "work budget scale");
    cmd->add_option("--c-trials", prm.c_trials, "repeated-sampler rounds");
    cmd->add_option("--rho", prm.rho, "budgeted solution size constant");
    cmd->add_option("--ratio-max", prm.ratio_max, "assumed inner approximation ratio");
    cmd->add_option("--seed", prm.seed, "rng seed (DYNKC_SEED overrides)");
    cmd->add_option_function<std::string>(
           "--sampler",
           [this](const std::string& v) {
             prm.sampler = v == "repeated" ? Sampler::kRepeated2k : Sampler::kIndependent;
           },
           "level sampler")
        ->check(CLI::IsMember({"independent", "repeated"}));
  }
};

std::optional<std::uint64_t> env_seed_override() {
  const char* env = std::getenv("DYNKC_SEED");
  if (!env || !*env) return std::nullopt;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(env, env + std::string(env).size(), v);
  if (ec != std::errc() || *ptr != '\0')
    throw ValidationError("DYNKC_SEED must be an unsigned integer");
  return v;
}

int cmd_gen(const std::string& strategy, std::size_t n_init, std::size_t n_updates,
            std::size_t dim, double delete_fraction, const std::string& algo,
            const std::string& out_path, Params prm) {
  GeneratorConfig cfg;
  if (strategy == "oblivious_random")
    cfg.kind = GeneratorKind::kObliviousRandom;
  else if (strategy == "adaptive_delete_center")
    cfg.kind = GeneratorKind::kAdaptiveDeleteCenter;
  else if (strategy == "churn")
    cfg.kind = GeneratorKind::kChurn;
  else
    return usage_error("unknown strategy: " + strategy);
  cfg.n_init = n_init;
  cfg.n_updates = n_updates;
  cfg.dim = dim;
  cfg.delete_fraction = delete_fraction;
  cfg.seed = prm.seed;

  bool adaptive = cfg.kind == GeneratorKind::kAdaptiveDeleteCenter;
  if (adaptive && algo.empty())
    return usage_error("adaptive strategies need --algo to co-simulate against");

  Stream s;
  s.dim = dim;
  StreamGenerator gen(cfg);
  s.events = gen.initial_events();
  s.events.reserve(n_init + n_updates);

  if (adaptive) {
    AlgoKind a = parse_algo(algo);
    MetricSpace m(dim);
    auto engine = make_engine(a, m, prm);
    for (const auto& ev : gen.initial_events()) m.add_point(ev.id, ev.coords);
    engine->preprocess(gen.initial_events());
    auto view = [&]() { return engine->solution(); };
    for (std::size_t i = 0; i < n_updates; ++i) {
      UpdateEvent ev = gen.next(view);
      if (ev.kind == UpdateEvent::Kind::kInsert) {
        m.add_point(ev.id, ev.coords);
        engine->apply(ev);
      } else {
        engine->apply(ev);
        m.remove_point(ev.id);
      }
      s.events.push_back(std::move(ev));
    }
  } else {
    auto view = []() { return std::vector<PointId>{}; };
    for (std::size_t i = 0; i < n_updates; ++i) s.events.push_back(gen.next(view));
  }

  std::string text = serialize_stream(s);
  if (out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) return run_error("cannot write " + out_path);
    out << text;
  }
  return 0;
}

int cmd_run(const std::string& stream_path, const std::string& algo,
            const std::string& metrics_path, const ReplayOptions& opts, const Params& prm) {
  AlgoKind a = parse_algo(algo);
  Stream s = load_stream(stream_path);
  MetricSpace m = make_metric(s);
  auto engine = make_engine(a, m, prm);

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (metrics_path != "-") {
    file.open(metrics_path, std::ios::binary);
    if (!file) return run_error("cannot write " + metrics_path);
    os = &file;
  }

  write_csv_header(*os, opts);
  replay(s, m, *engine, prm, opts,
         [&](const ReplayRow& row) { write_csv_row(*os, opts, row); });
  return 0;
}

int cmd_verify(const std::string& suite, const VerifyScale& scale) {
  std::vector<std::string> to_run;
  if (suite == "all") {
    to_run = suite_names();
  } else {
    bool known = false;
    for (const std::string& name : suite_names()) known = known || name == suite;
    if (!known) return usage_error("unknown suite: " + suite);
    to_run.push_back(suite);
  }
  std::vector<SuiteReport> reports;
  bool pass = true;
  for (const std::string& name : to_run) {
    reports.push_back(run_suite(name, scale));
    pass = pass && reports.back().pass;
  }
  std::cout << report_json(reports);
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fully dynamic k-center workbench"};
  app.require_subcommand(1);

  // gen
  CLI::App* gen = app.add_subcommand("gen", "generate an update stream");
  std::string g_strategy = "oblivious_random";
  std::size_t g_n_init = 100, g_n_updates = 1000, g_dim = 0;
  double g_delete_fraction = 0.5;
  std::string g_algo, g_out = "-";
  gen->add_option("--strategy", g_strategy, "adversary strategy")
      ->check(CLI::IsMember({"oblivious_random", "adaptive_delete_center", "churn"}));
  gen->add_option("--n-init", g_n_init, "initial population");
  gen->add_option("--n-updates", g_n_updates, "adversarial updates after the initial batch");
  gen->add_option("--dim", g_dim, "euclidean dimension")->required();
  gen->add_option("--delete-fraction", g_delete_fraction, "deletion share (oblivious only)");
  gen->add_option("--algo", g_algo, "engine the adaptive strategy co-simulates");
  gen->add_option("--out", g_out, "output path, - for stdout");
  ParamFlags g_params;
  g_params.attach(gen);

  // run
  CLI::App* run = app.add_subcommand("run", "replay a stream and emit per-update metrics");
  std::string r_stream, r_algo, r_metrics = "-";
  ReplayOptions r_opts;
  bool r_no_wall = false;
  run->add_option("stream", r_stream, "stream file, - for stdin")->required();
  run->add_option("--algo", r_algo, "engine to drive")
      ->required()
      ->check(CLI::IsMember(algo_names()));
  run->add_option("--metrics", r_metrics, "CSV output path, - for stdout");
  run->add_option("--preload", r_opts.preload,
                  "leading insertions handed to preprocessing instead of replay");
  run->add_option("--cost-every", r_opts.cost_every, "cost checkpoint period, 0 disables");
  run->add_flag("--oracle", r_opts.oracle, "optimal cost and ratio at checkpoints (small n)");
  run->add_flag("--no-wall", r_no_wall, "omit the wall-clock column (reproducible output)");
  ParamFlags r_params;
  r_params.attach(run);

  // verify
  CLI::App* ver = app.add_subcommand("verify", "run a verification suite");
  std::string v_suite;
  VerifyScale v_scale;
  ver->add_option("suite", v_suite,
                  "invariants | oracle-equivalence | recourse-bounds | work-bounds | "
                  "cost-ratio | all")
      ->required();
  ver->add_option("--updates", v_scale.updates, "updates per driven stream");
  ver->add_option("--n", v_scale.n, "initial population, 0 for the suite default");
  ver->add_option("--k", v_scale.k, "centers, 0 for the suite default");
  ver->add_option("--trials", v_scale.trials, "trial count, 0 for the suite default");
  ver->add_option("--seed", v_scale.seed, "rng seed (DYNKC_SEED overrides)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::optional<std::uint64_t> seed = env_seed_override();
    if (seed) {
      g_params.prm.seed = *seed;
      r_params.prm.seed = *seed;
      v_scale.seed = *seed;
    }

    if (gen->parsed()) {
      g_params.prm.validate();
      return cmd_gen(g_strategy, g_n_init, g_n_updates, g_dim, g_delete_fraction, g_algo, g_out,
                     g_params.prm);
    }
    if (run->parsed()) {
      r_params.prm.validate();
      r_opts.wall = !r_no_wall;
      return cmd_run(r_stream, r_algo, r_metrics, r_opts, r_params.prm);
    }
    if (ver->parsed()) return cmd_verify(v_suite, v_scale);
  } catch (const ValidationError& e) {
    return usage_error(e.what());
  } catch (const ParseError& e) {
    return run_error(e.what());
  } catch (const std::exception& e) {
    return run_error(e.what());
  }
  return usage_error("missing subcommand");
}
