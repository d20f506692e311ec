#include "rwt/cli.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "dataset.hpp"
#include "json.hpp"
#include "rwt/error.hpp"
#include "rwt/text.hpp"

namespace rwt {

namespace {

constexpr const char* kPaths = "Paths";

void error_record(std::ostream& err, std::string_view code, const std::string& message) {
  const nlohmann::ordered_json rec = {{"error", code}, {"message", message}};
  err << rec.dump() << '\n';
}

// key = value lines; '#' starts a comment. Keys are long flag names with or
// without the leading dashes, '_' and '-' interchangeable.
std::vector<std::string> config_arguments(const std::string& path) {
  std::istringstream in(cli::read_file(path));
  std::vector<std::string> args;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kUsageError,
                  path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(trim(s.substr(0, eq)));
    const std::string value(trim(s.substr(eq + 1)));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty() || key == "config") {
      throw Error(ErrorCode::kUsageError, path + ":" + std::to_string(line_no) + ": bad key");
    }
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// Config file arguments go right before the first flag, so anything given on
// the command line comes later and wins under the take-last policy.
std::vector<std::string> expand_config(std::span<const std::string> args) {
  std::vector<std::string> out(args.begin(), args.end());
  std::string path;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == "--config" && i + 1 < out.size()) {
      path = out[i + 1];
    } else if (out[i].rfind("--config=", 0) == 0) {
      path = out[i].substr(9);
    }
  }
  if (path.empty()) return out;
  const auto first_flag = std::find_if(out.begin(), out.end(),
                                       [](const std::string& a) { return a.rfind("-", 0) == 0; });
  const auto extra = config_arguments(path);
  out.insert(first_flag, extra.begin(), extra.end());
  return out;
}

// Hash over every non-path option of the command, in declaration order, with
// defaults filled in.
std::string config_hash(const CLI::App& app) {
  std::string canon = app.get_name() + "\n";
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_group() == kPaths || opt->get_name() == "--help") continue;
    std::string value;
    if (opt->count() > 0) {
      value = opt->results().back();
    } else {
      value = opt->get_default_str();
    }
    canon += opt->get_name() + "=" + value + "\n";
  }
  return hex64(fnv1a64(canon));
}

struct Command {
  CLI::App* app;
  std::function<void(const cli::RunInfo&)> run;
  std::uint64_t* seed = nullptr;
};

}  // namespace

int run_cli(std::span<const std::string> raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reservoir water temperature modelling and interpretation", "rwt"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_path;
  const auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value file; flags given here win")
        ->group(kPaths);
  };
  std::vector<Command> commands;

  cli::IngestOptions ingest;
  {
    CLI::App* s = app.add_subcommand("ingest", "Build a run directory from raw or synthetic data");
    s->add_flag("--synthetic", ingest.synthetic, "Generate synthetic profiles");
    s->add_option("--profiles", ingest.profiles, "Synthetic profile count");
    s->add_option("--depths", ingest.depths, "Synthetic depths per profile");
    s->add_option("--reservoirs", ingest.reservoirs, "Synthetic reservoir count");
    s->add_option("--noise", ingest.noise, "Synthetic target noise sigma");
    s->add_option("--seed", ingest.seed, "Synthetic generator seed");
    s->add_option("--scaler", ingest.scaler,
                  "fixed (published ranges), data (training rows) or auto: fixed for "
                  "--synthetic, data otherwise")
        ->check(CLI::IsMember({"auto", "fixed", "data"}));
    s->add_option("--window", ingest.window, "Antecedent window: inclusive or exclusive")
        ->check(CLI::IsMember({"inclusive", "exclusive"}));
    s->add_option("--ratio", ingest.ratio, "Train share of profiles");
    s->add_option("--split-seed", ingest.split_seed, "Profile split seed");
    s->add_option("--observations", ingest.observations, "Observations CSV")->group(kPaths);
    s->add_option("--daily", ingest.daily, "Daily covariates CSV")->group(kPaths);
    s->add_option("--morphometry", ingest.morphometry, "Morphometry CSV")->group(kPaths);
    s->add_option("--out", ingest.out, "Run directory")->required()->group(kPaths);
    add_config(s);
    commands.push_back({s, [&](const cli::RunInfo& i) { cli::run_ingest(ingest, i, out); },
                        &ingest.seed});
  }

  cli::TrainOptions train;
  {
    CLI::App* s = app.add_subcommand("train", "Fit one model on the training split");
    s->add_option("--model", train.model, "tree, rf, gbm, mlp or kan")
        ->required()
        ->check(CLI::IsMember({"tree", "rf", "gbm", "mlp", "kan"}));
    s->add_option("--name", train.name, "Model file stem (default: the model kind)");
    s->add_option("--preset", train.preset, "paper (published settings) or quick")
        ->check(CLI::IsMember({"paper", "quick"}));
    s->add_option("--seed", train.seed, "Training seed");
    s->add_option("--trees", train.trees, "Forest trees or boosting stages");
    s->add_option("--max-depth", train.max_depth, "Tree depth limit");
    s->add_option("--max-features", train.max_features, "Forest candidate features per split");
    s->add_option("--learning-rate", train.learning_rate, "Boosting, MLP or KAN step size");
    s->add_option("--epochs", train.epochs, "MLP epochs");
    s->add_option("--steps", train.steps, "KAN training steps");
    s->add_option("--lambda", train.lambda, "KAN magnitude penalty");
    s->add_option("--regime", train.regime, "KAN regime: simple or complex")
        ->check(CLI::IsMember({"simple", "complex"}));
    s->add_option("--grid", train.grid, "KAN spline intervals");
    s->add_option("--data", train.data, "Run directory from ingest")->required()->group(kPaths);
    s->add_option("--out", train.out, "Output directory")->required()->group(kPaths);
    add_config(s);
    commands.push_back(
        {s, [&](const cli::RunInfo& i) { cli::run_train(train, i, out); }, &train.seed});
  }

  cli::EvaluateOptions evaluate;
  {
    CLI::App* s = app.add_subcommand("evaluate", "Test-split metrics and plot data in degrees C");
    s->add_option("--quantiles", evaluate.quantiles, "Q-Q points")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
    s->add_option("--data", evaluate.data, "Run directory from ingest")->required()->group(kPaths);
    s->add_option("--models", evaluate.models, "Comma separated model files")
        ->required()
        ->group(kPaths);
    s->add_option("--out", evaluate.out, "Output directory")->required()->group(kPaths);
    add_config(s);
    commands.push_back({s, [&](const cli::RunInfo& i) { cli::run_evaluate(evaluate, i, out); }});
  }

  cli::ExplainOptions explain;
  {
    CLI::App* s = app.add_subcommand("explain", "Exact Shapley attributions on test rows");
    s->add_option("--background", explain.background, "Background rows from the training split");
    s->add_option("--instances", explain.instances, "Explained test rows");
    s->add_option("--seed", explain.seed, "Sampling seed");
    s->add_option("--threads", explain.threads, "Worker threads (0: all)");
    s->add_option("--data", explain.data, "Run directory from ingest")->required()->group(kPaths);
    s->add_option("--model", explain.model, "Model file")->required()->group(kPaths);
    s->add_option("--out", explain.out, "Output directory")->required()->group(kPaths);
    add_config(s);
    commands.push_back(
        {s, [&](const cli::RunInfo& i) { cli::run_explain(explain, i, out); }, &explain.seed});
  }

  cli::KanRunOptions kan;
  {
    CLI::App* s = app.add_subcommand("kan-run", "Incremental-input KAN training and snapping");
    s->add_option("--regime", kan.regime, "simple or complex")
        ->check(CLI::IsMember({"simple", "complex"}));
    s->add_option("--ordering", kan.ordering, "Comma separated 1-based feature order");
    s->add_option("--seeds", kan.seeds, "Comma separated seeds");
    s->add_option("--max-inputs", kan.max_inputs, "Longest prefix");
    s->add_option("--steps", kan.steps, "Training steps");
    s->add_option("--learning-rate", kan.learning_rate, "Step size");
    s->add_option("--lambda", kan.lambda, "Magnitude penalty");
    s->add_option("--grid", kan.grid, "Spline intervals");
    s->add_option("--snap-rows", kan.snap_rows, "Training rows used for snapping");
    s->add_option("--threads", kan.threads, "Worker threads (0: all)");
    s->add_option("--importance", kan.importance, "Importance CSV fixing the order")
        ->group(kPaths);
    s->add_option("--data", kan.data, "Run directory from ingest")->required()->group(kPaths);
    s->add_option("--out", kan.out, "Output directory")->required()->group(kPaths);
    add_config(s);
    commands.push_back({s, [&](const cli::RunInfo& i) { cli::run_kan(kan, i, out); }});
  }

  cli::EqOptions eq;
  {
    CLI::App* s = app.add_subcommand("eq", "Published equation bank");
    s->require_subcommand(1);
    CLI::App* list = s->add_subcommand("list", "Print every bank entry");
    commands.push_back({list, [&](const cli::RunInfo&) { cli::run_eq_list(out); }});

    CLI::App* ev = s->add_subcommand("eval", "Evaluate one entry");
    ev->add_option("--set", eq.set, "simple or complex")->check(CLI::IsMember({"simple", "complex"}));
    ev->add_option("--inputs", eq.inputs, "Number of inputs of the entry")->required();
    for (int i = 0; i < 10; ++i) {
      ev->add_option("--x" + std::to_string(i + 1), eq.x[i], "Normalized input value");
    }
    add_config(ev);
    commands.push_back({ev, [&](const cli::RunInfo&) { cli::run_eq_eval(eq, out); }});

    CLI::App* scan = s->add_subcommand("scan", "Random pole scan of every entry on [0,1]^d");
    scan->add_option("--points", eq.points, "Points per entry");
    scan->add_option("--seed", eq.seed, "Scan seed");
    add_config(scan);
    commands.push_back({scan, [&](const cli::RunInfo&) { cli::run_eq_scan(eq, out); }});
  }

  cli::ReportOptions report;
  {
    CLI::App* s = app.add_subcommand("report", "Assemble report.md from a results directory");
    s->add_option("--dir", report.dir, "Results directory")->required()->group(kPaths);
    s->add_option("--out", report.out, "Output directory (default: --dir)")->group(kPaths);
    add_config(s);
    commands.push_back({s, [&](const cli::RunInfo& i) { cli::run_report(report, i, out); }});
  }

  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const Error& e) {
    error_record(err, to_string(e.code()), e.what());
    return e.code() == ErrorCode::kUsageError ? 2 : 1;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    error_record(err, "UsageError", e.what());
    return 2;
  }

  for (const Command& c : commands) {
    if (!c.app->parsed()) continue;
    cli::RunInfo info;
    info.command = c.app->get_parent() && c.app->get_parent() != &app
                       ? c.app->get_parent()->get_name() + " " + c.app->get_name()
                       : c.app->get_name();
    info.config_hash = config_hash(*c.app);
    info.seed = c.seed ? *c.seed : 0;
    try {
      c.run(info);
    } catch (const Error& e) {
      error_record(err, to_string(e.code()), e.what());
      return e.code() == ErrorCode::kUsageError ? 2 : 1;
    } catch (const std::exception& e) {
      error_record(err, "Internal", e.what());
      return 1;
    }
    return 0;
  }
  error_record(err, "UsageError", "no command given");
  return 2;
}

}  // namespace rwt
