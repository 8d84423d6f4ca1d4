// Command-line front end: corpus generation, pruning, compression stats,
// training, evaluation and strategy comparison. Every command is
// deterministic given its flags; seeds are flags.
//
// Exit codes: 0 success, 2 usage or input error, 3 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "roppt/roppt.hpp"

namespace {

using nlohmann::ordered_json;

struct TrainFlags {
  std::string input;
  std::string format = "jsonl";
  std::string strategy = "tree:4";
  int epochs = 20;
  int batch = 16;
  double lr = 0.02;
  std::uint64_t seed = 1;
  double threshold = 0.5;
  int dim = 32;
  int layers = 1;
  bool no_positions = false;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_strategy = true) {
  cmd->add_option("--input", f.input, "corpus file")->required();
  cmd->add_option("--format", f.format, "corpus format: jsonl or conllu");
  if (with_strategy) cmd->add_option("--strategy", f.strategy, "denoising strategy");
  cmd->add_option("--epochs", f.epochs, "training epochs");
  cmd->add_option("--batch", f.batch, "mini-batch size");
  cmd->add_option("--lr", f.lr, "learning rate");
  cmd->add_option("--seed", f.seed, "seed for init and shuffling");
  cmd->add_option("--threshold", f.threshold, "decision threshold");
  cmd->add_option("--dim", f.dim, "encoder width");
  cmd->add_option("--layers", f.layers, "attention layers");
  cmd->add_flag("--no-positions", f.no_positions, "disable position encodings");
}

roppt::TrainConfig train_config(const TrainFlags& f) {
  roppt::TrainConfig cfg;
  cfg.epochs = f.epochs;
  cfg.batch_size = f.batch;
  cfg.lr = f.lr;
  cfg.seed = f.seed;
  cfg.threshold = f.threshold;
  cfg.strategy = roppt::parse_strategy(f.strategy);
  cfg.encoder.dim = f.dim;
  cfg.encoder.layers = f.layers;
  cfg.encoder.use_positions = !f.no_positions;
  cfg.encoder.seed = f.seed;
  return cfg;
}

std::vector<roppt::ContextMask> masks_for(const roppt::Corpus& corpus,
                                          const roppt::Strategy& strategy) {
  std::vector<roppt::ContextMask> masks;
  masks.reserve(corpus.instances.size());
  for (const auto& ins : corpus.instances) masks.push_back(roppt::apply_strategy(strategy, ins));
  return masks;
}

int cmd_gen(const roppt::SyntheticSpec& spec, const std::string& output) {
  roppt::Corpus corpus = roppt::gen_synthetic(spec);
  roppt::save_jsonl(corpus, output);
  std::printf("wrote %d instances to %s\n", corpus.size(), output.c_str());
  return 0;
}

int cmd_prune(const std::string& input, const std::string& format, const std::string& strategy,
              const std::string& output) {
  roppt::Corpus corpus = roppt::load_instances(input, roppt::parse_format(format));
  roppt::Strategy strat = roppt::parse_strategy(strategy);
  std::ofstream out(output);
  if (!out) throw roppt::ParseError(output + ": cannot open file for writing");
  for (const auto& ins : corpus.instances) {
    roppt::ContextMask mask = roppt::apply_strategy(strat, ins);
    ordered_json j;
    j["retained"] = mask.indices;
    j["compression"] = roppt::compression(mask, ins);
    out << j.dump() << "\n";
  }
  if (!out) throw roppt::ParseError(output + ": write failed");
  return 0;
}

int cmd_stats(const std::string& input, const std::string& format, const std::string& strategy,
              bool as_json) {
  roppt::Corpus corpus = roppt::load_instances(input, roppt::parse_format(format));
  roppt::Strategy strat = roppt::parse_strategy(strategy);
  roppt::CompressionReport rep = roppt::compression_report(corpus, masks_for(corpus, strat));
  if (as_json)
    std::cout << roppt::compression_to_json(rep).dump(2) << "\n";
  else
    std::cout << roppt::compression_to_text(rep);
  return 0;
}

int cmd_train(const TrainFlags& flags, const std::string& save, std::string history_path) {
  roppt::Corpus corpus = roppt::load_instances(flags.input, roppt::parse_format(flags.format));
  roppt::TrainConfig cfg = train_config(flags);
  roppt::TrainResult res = roppt::train(corpus, cfg);
  roppt::save_params(save, res.params, cfg.encoder);

  ordered_json hist;
  hist["strategy"] = roppt::to_string(cfg.strategy);
  hist["epochs"] = cfg.epochs;
  hist["history"] = ordered_json::array();
  for (const auto& e : res.history)
    hist["history"].push_back({{"epoch", e.epoch}, {"loss", e.mean_loss}, {"f1", e.f1}});
  hist["guard_events"] = res.guard_events;
  if (history_path.empty()) history_path = save + ".history.json";
  std::ofstream hout(history_path);
  if (!hout) throw roppt::ParseError(history_path + ": cannot open file for writing");
  hout << hist.dump(2) << "\n";

  const auto& last = res.history.back();
  std::printf("trained %d epochs on %d instances (strategy %s)\n", cfg.epochs, corpus.size(),
              roppt::to_string(cfg.strategy).c_str());
  std::printf("final train loss %.6f  f1 %.4f\n", last.mean_loss, last.f1);
  std::printf("params -> %s\nhistory -> %s\n", save.c_str(), history_path.c_str());
  return 0;
}

int cmd_eval(const std::string& input, const std::string& format, const std::string& params_path,
             const std::string& strategy, double threshold, bool as_json) {
  roppt::Corpus corpus = roppt::load_instances(input, roppt::parse_format(format));
  auto [params, enc] = roppt::load_params(params_path);
  roppt::Strategy strat = roppt::parse_strategy(strategy);
  std::vector<int> preds = roppt::predict_all(corpus, strat, params, enc, threshold);
  roppt::EvalReport rep = roppt::bucket_report(corpus, preds, masks_for(corpus, strat));
  if (as_json)
    std::cout << roppt::report_to_json(rep).dump(2) << "\n";
  else
    std::cout << roppt::report_to_text(rep);
  return 0;
}

int cmd_compare(const TrainFlags& flags, const std::vector<std::string>& strategy_names,
                bool as_json) {
  roppt::Corpus corpus = roppt::load_instances(flags.input, roppt::parse_format(flags.format));
  if (corpus.size() < 5) throw std::invalid_argument("compare: corpus too small to split");

  // Shared 80/20 split by seeded shuffle; every strategy sees the same data.
  std::vector<int> order(corpus.instances.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(flags.seed);
  roppt::shuffle_indices(order, rng);
  const int train_n = corpus.size() * 4 / 5;
  roppt::Corpus train_set, test_set;
  for (int k = 0; k < corpus.size(); ++k)
    (k < train_n ? train_set : test_set)
        .instances.push_back(corpus.instances[static_cast<std::size_t>(order[k])]);

  ordered_json rows = ordered_json::array();
  std::printf("%-12s %8s %8s %8s\n", "strategy", "prec", "rec", "f1");
  for (const std::string& name : strategy_names) {
    roppt::TrainConfig cfg = train_config(flags);
    cfg.strategy = roppt::parse_strategy(name);
    roppt::TrainResult res = roppt::train(train_set, cfg);
    std::vector<int> preds =
        roppt::predict_all(test_set, cfg.strategy, res.params, cfg.encoder, cfg.threshold);
    roppt::Confusion conf;
    for (std::size_t i = 0; i < preds.size(); ++i)
      conf.add(preds[i], test_set.instances[i].label);
    roppt::Prf prf = roppt::micro_prf(conf);
    std::printf("%-12s %8.3f %8.3f %8.3f\n", name.c_str(), prf.precision, prf.recall, prf.f1);
    rows.push_back({{"strategy", name},
                    {"precision", prf.precision},
                    {"recall", prf.recall},
                    {"f1", prf.f1}});
  }
  if (as_json) std::cout << rows.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"target-oriented parse-tree pruning for metaphor detection"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "emit a synthetic planted-signal corpus");
  roppt::SyntheticSpec spec;
  std::string gen_output;
  gen->add_option("--seed", spec.seed, "generator seed");
  gen->add_option("--n", spec.count, "instance count")->required();
  gen->add_option("--min-len", spec.min_len, "minimum sentence length");
  gen->add_option("--max-len", spec.max_len, "maximum sentence length");
  gen->add_option("--marker-range", spec.marker_range, "tree distance of the planted marker");
  gen->add_option("--min-linear-offset", spec.min_linear_offset,
                  "plant markers only beyond this positional distance");
  gen->add_option("--output", gen_output, "output JSONL path")->required();

  // prune
  auto* prn = app.add_subcommand("prune", "write retained indices per instance");
  std::string prn_input, prn_format = "jsonl", prn_strategy = "tree:4", prn_output;
  prn->add_option("--input", prn_input)->required();
  prn->add_option("--format", prn_format);
  prn->add_option("--strategy", prn_strategy);
  prn->add_option("--output", prn_output)->required();

  // stats
  auto* sts = app.add_subcommand("stats", "bucketed compression report");
  std::string sts_input, sts_format = "jsonl", sts_strategy = "tree:4";
  bool sts_json = false;
  sts->add_option("--input", sts_input)->required();
  sts->add_option("--format", sts_format);
  sts->add_option("--strategy", sts_strategy);
  sts->add_flag("--json", sts_json, "machine-readable output");

  // train
  auto* trn = app.add_subcommand("train", "train a classifier");
  TrainFlags trn_flags;
  std::string trn_save, trn_history;
  add_train_flags(trn, trn_flags);
  trn->add_option("--save", trn_save, "parameter file to write")->required();
  trn->add_option("--history", trn_history, "history JSON path (default <save>.history.json)");

  // eval
  auto* evl = app.add_subcommand("eval", "evaluate saved parameters");
  std::string evl_input, evl_format = "jsonl", evl_params, evl_strategy = "tree:4";
  double evl_threshold = 0.5;
  bool evl_json = false;
  evl->add_option("--input", evl_input)->required();
  evl->add_option("--format", evl_format);
  evl->add_option("--params", evl_params)->required();
  evl->add_option("--strategy", evl_strategy);
  evl->add_option("--threshold", evl_threshold);
  evl->add_flag("--json", evl_json);

  // compare
  auto* cmp = app.add_subcommand("compare", "train and score several strategies");
  TrainFlags cmp_flags;
  std::string cmp_strategies;
  bool cmp_json = false;
  add_train_flags(cmp, cmp_flags, /*with_strategy=*/false);
  cmp->add_option("--strategies", cmp_strategies, "comma-separated strategy list")->required();
  cmp->add_flag("--json", cmp_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(spec, gen_output);
    if (prn->parsed()) return cmd_prune(prn_input, prn_format, prn_strategy, prn_output);
    if (sts->parsed()) return cmd_stats(sts_input, sts_format, sts_strategy, sts_json);
    if (trn->parsed()) return cmd_train(trn_flags, trn_save, trn_history);
    if (evl->parsed()) return cmd_eval(evl_input, evl_format, evl_params, evl_strategy,
                                       evl_threshold, evl_json);
    if (cmp->parsed()) {
      std::vector<std::string> names;
      std::size_t start = 0;
      while (start <= cmp_strategies.size()) {
        std::size_t comma = cmp_strategies.find(',', start);
        if (comma == std::string::npos) comma = cmp_strategies.size();
        if (comma > start) names.push_back(cmp_strategies.substr(start, comma - start));
        start = comma + 1;
      }
      if (names.size() < 2)
        throw std::invalid_argument("compare: need at least two strategies");
      return cmd_compare(cmp_flags, names, cmp_json);
    }
  } catch (const roppt::TrainingDiverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
