#include "revmine/cli.hpp"

#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "revmine/config.hpp"
#include "revmine/stages.hpp"
#include "revmine/util.hpp"

namespace revmine {

namespace {

struct FlagMap {
  // flag name -> config key it overrides
  std::vector<std::pair<std::string, std::string>> entries;
  std::unordered_map<std::string, std::string> values;

  void attach(CLI::App* cmd, const std::string& flag, const std::string& key,
              const std::string& help) {
    entries.emplace_back(flag, key);
    cmd->add_option(flag, values[key], help);
  }
};

void merge(KeyValueConfig& cfg, const FlagMap& flags) {
  for (const auto& [flag, key] : flags.entries) {
    auto it = flags.values.find(key);
    if (it != flags.values.end() && !it->second.empty())
      cfg.set(key, it->second);
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"revision-pair mining and pairwise ranking toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  struct Sub {
    CLI::App* cmd;
    FlagMap flags;
    std::function<Manifest(const KeyValueConfig&)> runner;
  };
  std::vector<Sub> subs;

  auto add = [&](const std::string& name, const std::string& help,
                 std::function<Manifest(const KeyValueConfig&)> runner) -> Sub& {
    CLI::App* cmd = app.add_subcommand(name, help);
    cmd->add_option("--config", config_path, "flat key=value config file");
    subs.push_back({cmd, {}, std::move(runner)});
    return subs.back();
  };

  {
    Sub& s = add("filter", "apply the cleaning and extraction rules",
                 stages::run_filter);
    s.flags.attach(s.cmd, "--pairs", "pairs", "input pairs JSONL");
    s.flags.attach(s.cmd, "--dict", "dict", "dictionary word list");
    s.flags.attach(s.cmd, "--out", "filter_out", "kept pairs JSONL");
    s.flags.attach(s.cmd, "--report", "filter_report", "per-rule drop counts TSV");
  }
  {
    Sub& s = add("frames", "label pairs with frame-to-frame relations",
                 stages::run_frames);
    s.flags.attach(s.cmd, "--pairs", "pairs", "input pairs JSONL");
    s.flags.attach(s.cmd, "--graph", "frame_graph", "frame relation TSV");
    s.flags.attach(s.cmd, "--out", "frames_out", "labeled pairs JSONL");
    s.flags.attach(s.cmd, "--stats", "frames_stats", "relation counts TSV");
    s.flags.attach(s.cmd, "--partition", "partition", "optional split TSV");
  }
  {
    Sub& s = add("split", "partition pairs and assign slot order",
                 stages::run_split);
    s.flags.attach(s.cmd, "--pairs", "pairs", "input pairs JSONL");
    s.flags.attach(s.cmd, "--partition", "partition", "article split TSV");
    s.flags.attach(s.cmd, "--outdir", "split_dir", "output directory");
    s.flags.attach(s.cmd, "--seed", "seed", "slot assignment seed");
  }
  {
    Sub& s = add("train", "train the pairwise model", stages::run_train);
    s.flags.attach(s.cmd, "--model", "model_out", "checkpoint output path");
    s.flags.attach(s.cmd, "--vectors", "vectors", "word vector text file");
    s.flags.attach(s.cmd, "--data", "data_dir", "split directory");
    s.flags.attach(s.cmd, "--train-pairs", "train_pairs", "training pairs JSONL");
    s.flags.attach(s.cmd, "--val-pairs", "val_pairs", "validation pairs JSONL");
    s.flags.attach(s.cmd, "--precomputed", "precomputed",
                   "precomputed token-vector matrices JSONL");
    s.flags.attach(s.cmd, "--seed", "seed", "training seed");
  }
  {
    Sub& s = add("eval", "score pairs with a trained model", stages::run_eval);
    s.flags.attach(s.cmd, "--model", "model", "checkpoint path");
    s.flags.attach(s.cmd, "--vectors", "vectors", "word vector text file");
    s.flags.attach(s.cmd, "--data", "data_dir", "split directory");
    s.flags.attach(s.cmd, "--split", "eval_split", "train, test or val");
    s.flags.attach(s.cmd, "--pairs", "eval_pairs", "explicit pairs JSONL");
    s.flags.attach(s.cmd, "--out", "predictions_out", "predictions JSONL");
    s.flags.attach(s.cmd, "--precomputed", "precomputed",
                   "precomputed token-vector matrices JSONL");
  }
  {
    Sub& s = add("analyze", "accuracy and error breakdown reports",
                 stages::run_analyze);
    s.flags.attach(s.cmd, "--predictions", "predictions", "predictions JSONL");
    s.flags.attach(s.cmd, "--vectors", "vectors", "word vector text file");
    s.flags.attach(s.cmd, "--out", "analysis_dir", "report directory");
  }
  {
    Sub& s = add("pipeline", "run every stage under one output directory",
                 stages::run_pipeline);
    s.flags.attach(s.cmd, "--outdir", "outdir", "output directory");
    s.flags.attach(s.cmd, "--seed", "seed", "run seed");
  }

  // args follows main()'s argv convention: args[0] is the program name.
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (Sub& s : subs) {
      if (!s.cmd->parsed()) continue;
      KeyValueConfig cfg;
      if (!config_path.empty()) cfg = KeyValueConfig::from_file(config_path);
      merge(cfg, s.flags);
      // `--data` expands to the conventional split file layout unless the
      // explicit per-file keys are present.
      if (cfg.has("data_dir")) {
        std::string dir = cfg.require("data_dir");
        if (!cfg.has("train_pairs")) cfg.set("train_pairs", dir + "/train.jsonl");
        if (!cfg.has("val_pairs")) cfg.set("val_pairs", dir + "/val.jsonl");
        if (!cfg.has("eval_pairs")) {
          std::string split = cfg.get_string("eval_split", "test");
          cfg.set("eval_pairs", dir + "/" + split + ".jsonl");
        }
      }
      s.runner(cfg);
      return 0;
    }
    std::cerr << "error: no subcommand given" << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}

}  // namespace revmine
