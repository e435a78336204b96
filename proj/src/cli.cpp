#include "hiercon/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hiercon/ablation.hpp"
#include "hiercon/config.hpp"
#include "hiercon/corpus.hpp"
#include "hiercon/error.hpp"
#include "hiercon/evaluation.hpp"
#include "hiercon/synth.hpp"
#include "hiercon/trainer.hpp"

namespace hiercon {

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config;
  std::string hierarchy = "pdtb3";
  std::string strategy;
  std::optional<double> beta;
  std::optional<std::uint64_t> seed;
  std::string encoder;
  std::string out = ".";
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "flat key = value config file");
  cmd->add_option("--hierarchy", f.hierarchy, "pdtb2, pdtb3, or a hierarchy file path");
  cmd->add_option("--strategy", f.strategy, "ours, method1, method2, method3, method4");
  cmd->add_option("--beta", f.beta, "contrastive loss weight");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--encoder", f.encoder, "toy or adapter");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--set", f.overrides, "extra key=value config overrides");
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LookupError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw LookupError("cannot write '" + path.string() + "'");
  return out;
}

// Config file, then --strategy, then --set overrides, then the scalar flags.
TrainConfig effective_config(const CommonFlags& f) {
  TrainConfig cfg;
  if (!f.config.empty()) {
    auto in = open_in(f.config);
    cfg = read_config(in);
  }
  if (!f.strategy.empty()) cfg.strategy = Strategy::defaults(parse_strategy(f.strategy));
  for (const auto& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.beta) cfg.beta = *f.beta;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.encoder.empty()) cfg.encoder.kind = f.encoder;
  cfg.validate();
  return cfg;
}

void write_effective_config(const fs::path& dir, const TrainConfig& cfg) {
  auto out = open_out(dir / "effective_config.cfg");
  write_config(out, cfg);
}

struct LoadedCorpus {
  SenseHierarchy hierarchy;
  std::vector<RelationExample> examples;
  std::size_t rejects = 0;
};

// Hierarchy is held by value so the corpus can point at it.
std::unique_ptr<LoadedCorpus> load_corpus(const std::string& path, const std::string& hierarchy) {
  auto lc = std::make_unique<LoadedCorpus>();
  lc->hierarchy = hierarchy_from_arg(hierarchy);
  auto in = open_in(path);
  IngestResult r = ingest(in, lc->hierarchy);
  lc->examples = std::move(r.corpus.examples);
  lc->rejects = r.rejects.size();
  return lc;
}

SplitSet splits_of(const LoadedCorpus& lc) {
  Corpus c{lc.hierarchy.version(), lc.examples, &lc.hierarchy};
  return split_sections(c);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ValidationError("bad list entry '" + item + "'");
    }
  }
  return out;
}

std::string sweep_table(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << std::setw(6) << "beta" << std::setw(10) << "L1 Acc" << std::setw(10) << "L1 F1"
      << std::setw(10) << "L2 Acc" << std::setw(10) << "L2 F1" << "   (dev, mean of "
      << (rows.empty() ? 0 : rows.front().seeds) << " seeds)\n";
  for (const auto& r : rows)
    out << std::setw(6) << r.beta << std::setw(10) << 100 * r.dev_accuracy_l1 << std::setw(10)
        << 100 * r.dev_macro_f1_l1 << std::setw(10) << 100 * r.dev_accuracy_l2 << std::setw(10)
        << 100 * r.dev_macro_f1_l2 << '\n';
  return out.str();
}

void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows) {
  for (const auto& r : rows)
    out << nlohmann::json{{"beta", r.beta},
                          {"seeds", r.seeds},
                          {"dev_accuracy_l1", r.dev_accuracy_l1},
                          {"dev_macro_f1_l1", r.dev_macro_f1_l1},
                          {"dev_accuracy_l2", r.dev_accuracy_l2},
                          {"dev_macro_f1_l2", r.dev_macro_f1_l2}}
               .dump()
        << '\n';
}

std::vector<nlohmann::json> read_records(const std::string& path) {
  auto in = open_in(path);
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error&) {
      throw ValidationError("'" + path + "' is not line-delimited JSON");
    }
  }
  return out;
}

// Renders any file this tool writes as a human-readable table.
std::string render_report(const std::string& path) {
  const auto records = read_records(path);
  if (records.empty()) return "(empty)\n";
  const auto& first = records.front();
  if (first.contains("beta") && first.contains("dev_macro_f1_l2")) {
    std::vector<SweepRow> rows;
    for (const auto& j : records)
      rows.push_back({j.at("beta").get<double>(), j.at("seeds").get<int>(),
                      j.at("dev_accuracy_l1").get<double>(), j.at("dev_macro_f1_l1").get<double>(),
                      j.at("dev_accuracy_l2").get<double>(), j.at("dev_macro_f1_l2").get<double>()});
    return sweep_table(rows);
  }
  if (first.contains("variant")) {
    std::vector<AblationRow> rows;
    for (const auto& j : records) {
      AblationRow r{j.at("table").get<std::string>(), j.at("variant").get<std::string>()};
      r.dev_accuracy_l1 = j.at("dev_accuracy_l1");
      r.dev_macro_f1_l1 = j.at("dev_macro_f1_l1");
      r.dev_accuracy_l2 = j.at("dev_accuracy_l2");
      r.dev_macro_f1_l2 = j.at("dev_macro_f1_l2");
      r.test_accuracy_l1 = j.at("test_accuracy_l1");
      r.test_macro_f1_l1 = j.at("test_macro_f1_l1");
      r.test_accuracy_l2 = j.at("test_accuracy_l2");
      r.test_macro_f1_l2 = j.at("test_macro_f1_l2");
      rows.push_back(r);
    }
    return ablation_table(rows);
  }
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  for (const auto& j : records) {
    for (const auto& key : {"epoch", "split", "level", "metric", "label"})
      if (j.contains(key)) out << j.at(key).dump() << ' ';
    if (j.contains("value")) out << j.at("value").get<double>();
    out << '\n';
  }
  return out.str();
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchy-guided contrastive learning for implicit discourse relations"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  CommonFlags f;
  std::string input, corpus_path, checkpoint_path, split = "test", grid, seeds;
  int per_class = 40;
  double noise = 0.01;
  bool no_contrastive = false, no_augmentation = false, strategies = false;

  auto* ingest_cmd = app.add_subcommand("ingest", "validate a corpus file");
  add_common(ingest_cmd, f);
  ingest_cmd->add_option("--input", input, "line-delimited corpus records")->required();

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  add_common(synth_cmd, f);
  synth_cmd->add_option("--per-class", per_class, "examples per terminal sense");
  synth_cmd->add_option("--noise", noise, "fraction of examples with a second sense");
  SynthOptions synth_opt;
  synth_cmd->add_option("--sister-share", synth_opt.sister_share, "token mass shared by level-1 sisters");
  synth_cmd->add_option("--cross-share", synth_opt.cross_share, "token mass shared by all senses");
  synth_cmd->add_option("--level2-fraction", synth_opt.level2_fraction,
                        "part of the remaining mass drawn from the level-2 pool");
  synth_cmd->add_option("--min-tokens", synth_opt.min_arg_tokens, "shortest argument");
  synth_cmd->add_option("--max-tokens", synth_opt.max_arg_tokens, "longest argument");

  auto* train_cmd = app.add_subcommand("train", "train one model");
  add_common(train_cmd, f);
  train_cmd->add_option("--corpus", corpus_path)->required();

  auto* sweep_cmd = app.add_subcommand("sweep-beta", "train across a beta grid");
  add_common(sweep_cmd, f);
  sweep_cmd->add_option("--corpus", corpus_path)->required();
  sweep_cmd->add_option("--grid", grid, "comma-separated betas (default 0,0.2,...,2.4)");
  sweep_cmd->add_option("--seeds", seeds, "comma-separated seeds (default: --seed)");

  auto* ablate_cmd = app.add_subcommand("ablate", "compare strategies and component toggles");
  add_common(ablate_cmd, f);
  ablate_cmd->add_option("--corpus", corpus_path)->required();
  ablate_cmd->add_flag("--no-contrastive", no_contrastive, "multi-task baseline comparison");
  ablate_cmd->add_flag("--no-augmentation", no_augmentation, "augmentation comparison");
  ablate_cmd->add_flag("--strategies", strategies, "negative-selection strategy comparison");

  auto* eval_cmd = app.add_subcommand("eval", "score a checkpoint on a split");
  add_common(eval_cmd, f);
  eval_cmd->add_option("--checkpoint", checkpoint_path)->required();
  eval_cmd->add_option("--corpus", corpus_path)->required();
  eval_cmd->add_option("--split", split)->check(CLI::IsMember({"train", "dev", "test"}));

  auto* report_cmd = app.add_subcommand("report", "render a results file as a table");
  report_cmd->add_option("--input", input)->required();

  std::vector<std::string> argv_store = args;
  if (argv_store.empty()) argv_store.emplace_back("hiercon");
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  std::string command = "hiercon";
  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return 0;
    }
    command = app.get_subcommands().front()->get_name();
    const fs::path dir = f.out;

    if (command == "report") {
      out << render_report(input);
      return 0;
    }
    fs::create_directories(dir);

    if (command == "ingest") {
      const SenseHierarchy h = hierarchy_from_arg(f.hierarchy);
      auto in = open_in(input);
      const IngestResult r = ingest(in, h);
      auto corpus_out = open_out(dir / "corpus.jsonl");
      write_corpus(corpus_out, r.corpus.examples);
      auto rejects_out = open_out(dir / "rejects.jsonl");
      write_rejects(rejects_out, r.rejects);
      out << nlohmann::json{{"accepted", r.corpus.examples.size()}, {"rejected", r.rejects.size()}}
                 .dump()
          << '\n';
    } else if (command == "synth") {
      const SenseHierarchy h = hierarchy_from_arg(f.hierarchy);
      const Corpus c = generate(h, per_class, f.seed.value_or(1), noise, synth_opt);
      auto corpus_out = open_out(dir / "corpus.jsonl");
      write_corpus(corpus_out, c.examples);
      out << nlohmann::json{{"examples", c.examples.size()}}.dump() << '\n';
    } else if (command == "train") {
      const TrainConfig cfg = effective_config(f);
      const auto lc = load_corpus(corpus_path, f.hierarchy);
      write_effective_config(dir, cfg);
      const TrainResult r = train(cfg, splits_of(*lc), lc->hierarchy);
      auto ckpt = open_out(dir / "checkpoint.json");
      save_checkpoint(ckpt, r.best);
      auto hist = open_out(dir / "history.jsonl");
      write_history(hist, r.history);
      out << nlohmann::json{{"epochs", r.epochs_run},
                            {"best_epoch", r.best_epoch},
                            {"dev", r.best.dev_metrics},
                            {"corpus_rejects", lc->rejects}}
                 .dump()
          << '\n';
    } else if (command == "sweep-beta") {
      const TrainConfig cfg = effective_config(f);
      const auto lc = load_corpus(corpus_path, f.hierarchy);
      write_effective_config(dir, cfg);
      const auto g = grid.empty() ? default_beta_grid() : parse_list(grid);
      std::vector<std::uint64_t> s;
      for (double v : parse_list(seeds)) s.push_back(static_cast<std::uint64_t>(v));
      const auto rows = sweep_beta(cfg, splits_of(*lc), lc->hierarchy, g, s);
      auto sweep_out = open_out(dir / "sweep.jsonl");
      write_sweep(sweep_out, rows);
      out << sweep_table(rows);
    } else if (command == "ablate") {
      const TrainConfig cfg = effective_config(f);
      const auto lc = load_corpus(corpus_path, f.hierarchy);
      write_effective_config(dir, cfg);
      AblationPlan plan;
      if (no_contrastive || no_augmentation || strategies) {
        plan.contrastive = no_contrastive;
        plan.augmentation = no_augmentation;
        plan.strategies = strategies;
      }
      const auto rows = run_ablation(cfg, splits_of(*lc), lc->hierarchy, plan);
      auto ablation_out = open_out(dir / "ablation.jsonl");
      write_ablation(ablation_out, rows);
      out << ablation_table(rows);
    } else if (command == "eval") {
      auto ckpt_in = open_in(checkpoint_path);
      const Checkpoint ckpt = load_checkpoint(ckpt_in);
      const std::string hier =
          eval_cmd->count("--hierarchy") > 0 ? f.hierarchy : to_string(ckpt.version);
      const auto lc = load_corpus(corpus_path, hier);
      const auto model = model_from_checkpoint(ckpt, lc->hierarchy);
      const SplitSet s = splits_of(*lc);
      const auto& examples = split == "train" ? s.train : split == "dev" ? s.dev : s.test;
      if (examples.empty()) throw UsageError("split '" + split + "' is empty");
      const Evaluation ev = evaluate(*model, examples, lc->hierarchy);
      auto report_out = open_out(dir / ("report_" + split + ".jsonl"));
      write_report_records(report_out, ev.l1, split);
      write_report_records(report_out, ev.l2, split);
      auto pred_out = open_out(dir / ("predictions_" + split + ".jsonl"));
      write_predictions(pred_out, ev.preds_l1, Level::l1);
      write_predictions(pred_out, ev.preds_l2, Level::l2);
      const std::string t1 = per_class_table(ev.l1, lc->hierarchy);
      const std::string t2 = per_class_table(ev.l2, lc->hierarchy);
      auto table_out = open_out(dir / ("tables_" + split + ".txt"));
      table_out << "Level-1\n" << t1 << "\nLevel-2\n" << t2;
      out << "Level-1\n" << t1 << "\nLevel-2\n" << t2;
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    err << nlohmann::json{{"error", e.what()}, {"command", command}, {"kind", "usage"}}.dump()
        << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << nlohmann::json{{"error", e.what()}, {"command", command}}.dump() << '\n';
    return 1;
  }
}

} // namespace hiercon
