#include "revmine/stages.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "revmine/analysis.hpp"
#include "revmine/corpus.hpp"
#include "revmine/dataset.hpp"
#include "revmine/embed.hpp"
#include "revmine/filters.hpp"
#include "revmine/framerel.hpp"
#include "revmine/ranker.hpp"

namespace revmine {
namespace stages {

namespace fs = std::filesystem;

namespace {

std::string dir_of(const std::string& path) {
  fs::path p(path);
  fs::path dir = p.parent_path();
  return dir.empty() ? std::string(".") : dir.string();
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw Error("cannot create directory " + path + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file for writing: " + path);
  out << text;
  if (!out) throw Error("write failed: " + path);
}

uint64_t seed_of(const KeyValueConfig& cfg) {
  return static_cast<uint64_t>(cfg.get_int("seed", 0));
}

FilterConfig filter_config(const KeyValueConfig& cfg) {
  FilterConfig fc;
  fc.min_len = static_cast<int>(cfg.get_int("min_len", fc.min_len));
  fc.max_len = static_cast<int>(cfg.get_int("max_len", fc.max_len));
  fc.max_edit_distance_exclusive = static_cast<int>(
      cfg.get_int("max_edit_distance", fc.max_edit_distance_exclusive));
  fc.validate();
  return fc;
}

TrainConfig train_config(const KeyValueConfig& cfg) {
  TrainConfig tc;
  tc.epochs = static_cast<int>(cfg.get_int("epochs", tc.epochs));
  tc.batch_size = static_cast<int>(cfg.get_int("batch_size", tc.batch_size));
  tc.learning_rate = cfg.get_double("learning_rate", tc.learning_rate);
  tc.seed = seed_of(cfg);
  std::string prec = cfg.get_string("precision", "double");
  if (prec == "double") tc.precision = Precision::Double;
  else if (prec == "single") tc.precision = Precision::Single;
  else throw Error("precision must be 'single' or 'double', got '" + prec + "'");
  tc.validate();
  return tc;
}

nn::AttentionKind att_kind(const KeyValueConfig& cfg) {
  std::string kind = cfg.get_string("att_kind", "proj_tanh");
  if (kind == "proj_tanh") return nn::AttentionKind::ProjTanh;
  if (kind == "dot") return nn::AttentionKind::Dot;
  throw Error("att_kind must be 'proj_tanh' or 'dot', got '" + kind + "'");
}

RankerHyper ranker_hyper(const KeyValueConfig& cfg, int input_dim) {
  RankerHyper h;
  h.input_dim = input_dim;
  h.hidden = static_cast<int>(cfg.get_int("hidden", h.hidden));
  h.joint_hidden =
      static_cast<int>(cfg.get_int("joint_hidden", h.joint_hidden));
  h.att_dim = static_cast<int>(cfg.get_int("att_dim", h.att_dim));
  h.att_kind = att_kind(cfg);
  h.dropout = cfg.get_double("dropout", h.dropout);
  h.tie_weights = cfg.get_bool("tie_weights", false);
  h.validate();
  return h;
}

OovPolicy oov_policy(const KeyValueConfig& cfg) {
  std::string policy = cfg.get_string("oov_policy", "zero");
  if (policy == "zero") return OovPolicy::zero();
  if (policy == "hashed") return OovPolicy::hashed_random(seed_of(cfg));
  throw Error("oov_policy must be 'zero' or 'hashed', got '" + policy + "'");
}

EmbeddingTable load_table(const KeyValueConfig& cfg) {
  std::optional<int> expected;
  if (cfg.has("input_dim"))
    expected = static_cast<int>(cfg.get_int("input_dim", 0));
  return load_embeddings(cfg.require("vectors"), expected, oov_policy(cfg));
}

SlotAssignment slot_for(const RevisionPair& pair, uint64_t seed) {
  if (pair.slot_a) {
    SlotAssignment a;
    a.pair_id = pair.pair_id;
    a.slot_a_holds = *pair.slot_a == "revised" ? SlotContent::Revised
                                               : SlotContent::Original;
    return a;
  }
  return assign_slots(pair, seed);
}

template <typename S>
nn::Mat<S> side_matrix(const RevisionPair& pair, const std::string& side,
                       const EmbeddingTable& table,
                       const PrecomputedStore* pre) {
  if (pre != nullptr) {
    if (const Eigen::MatrixXd* m = pre->find(pair.pair_id, side))
      return m->template cast<S>();
    throw Error("precomputed matrix missing for pair " + pair.pair_id +
                " side " + side);
  }
  const AnnotatedSentence& sentence =
      side == "original" ? pair.original : pair.revised;
  return to_scalar<S>(embed_sentence(embedding_tokens(sentence), table));
}

template <typename S>
std::vector<PairExample<S>> make_pair_examples(
    const std::vector<RevisionPair>& pairs, const EmbeddingTable& table,
    const PrecomputedStore* pre, uint64_t seed) {
  std::vector<PairExample<S>> out;
  out.reserve(pairs.size());
  for (const RevisionPair& p : pairs) {
    SlotAssignment slot = slot_for(p, seed);
    PairExample<S> ex;
    ex.pair_id = p.pair_id;
    bool a_is_revised = slot.slot_a_holds == SlotContent::Revised;
    ex.a = side_matrix<S>(p, a_is_revised ? "revised" : "original", table, pre);
    ex.b = side_matrix<S>(p, a_is_revised ? "original" : "revised", table, pre);
    ex.gold_slot = a_is_revised ? 0 : 1;
    out.push_back(std::move(ex));
  }
  return out;
}

template <typename S>
std::vector<SentenceExample<S>> make_sentence_examples(
    const std::vector<RevisionPair>& pairs, const EmbeddingTable& table,
    const PrecomputedStore* pre) {
  std::vector<SentenceExample<S>> out;
  out.reserve(2 * pairs.size());
  for (const RevisionPair& p : pairs) {
    out.push_back({side_matrix<S>(p, "original", table, pre), 0});
    out.push_back({side_matrix<S>(p, "revised", table, pre), 1});
  }
  return out;
}

std::string history_tsv(const TrainHistory& history) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "epoch\ttrain_loss\tval_accuracy\n";
  for (const EpochStats& e : history.epochs)
    out << e.epoch << '\t' << e.train_loss << '\t' << e.val_accuracy << '\n';
  return out.str();
}

}  // namespace

Manifest run_filter(const KeyValueConfig& cfg) {
  std::string pairs_path = cfg.require("pairs");
  std::string dict_path = cfg.require("dict");
  std::string out_path = cfg.require("filter_out");
  std::string report_path = cfg.require("filter_report");
  FilterConfig fc = filter_config(cfg);
  auto dict = load_dictionary(dict_path);

  std::vector<RevisionPair> pairs = read_pairs_file(pairs_path);
  std::vector<FilterDecision> decisions = util::parallel_map(
      pairs,
      [&](const RevisionPair& p) { return filter_pair(p, fc, dict); },
      util::thread_cap());

  FilterReport report;
  ensure_dir(dir_of(out_path));
  ensure_dir(dir_of(report_path));
  {
    PairsWriter writer(out_path);
    for (size_t i = 0; i < pairs.size(); ++i) {
      report.add(decisions[i]);
      if (decisions[i].keep) writer.write(pairs[i]);
    }
  }
  write_text(report_path, report.to_tsv());

  Manifest m = make_manifest("filter", cfg);
  m.add_input("pairs", pairs_path);
  m.add_input("dict", dict_path);
  m.add_output("filtered", out_path);
  m.add_output("report", report_path);
  m.write(dir_of(out_path) + "/manifest_filter.json");
  return m;
}

Manifest run_frames(const KeyValueConfig& cfg) {
  std::string pairs_path = cfg.require("pairs");
  std::string graph_path = cfg.require("frame_graph");
  std::string out_path = cfg.require("frames_out");
  std::string stats_path = cfg.require("frames_stats");

  FrameGraph graph = load_frame_graph(graph_path);
  std::vector<RevisionPair> pairs = read_pairs_file(pairs_path);
  for (RevisionPair& p : pairs) {
    p.relation = to_string(
        classify_relation(p.original.root_frame, p.revised.root_frame, graph));
  }

  std::unordered_map<std::string, std::string> splits;
  const std::unordered_map<std::string, std::string>* splits_ptr = nullptr;
  if (cfg.has("partition")) {
    splits = load_partition_map(cfg.require("partition")).as_strings();
    splits_ptr = &splits;
  }
  RelationStats stats = relation_stats(pairs, graph, splits_ptr);

  ensure_dir(dir_of(out_path));
  ensure_dir(dir_of(stats_path));
  write_pairs_file(out_path, pairs);
  write_text(stats_path, stats.to_tsv());

  Manifest m = make_manifest("frames", cfg);
  m.add_input("pairs", pairs_path);
  m.add_input("frame_graph", graph_path);
  if (cfg.has("partition")) m.add_input("partition", cfg.require("partition"));
  m.add_output("labeled", out_path);
  m.add_output("stats", stats_path);
  m.write(dir_of(out_path) + "/manifest_frames.json");
  return m;
}

Manifest run_split(const KeyValueConfig& cfg) {
  std::string pairs_path = cfg.require("pairs");
  std::string partition_path = cfg.require("partition");
  std::string split_dir = cfg.require("split_dir");
  uint64_t seed = seed_of(cfg);

  std::vector<RevisionPair> pairs = read_pairs_file(pairs_path);
  PartitionMap pm = load_partition_map(partition_path);
  SplitResult split = split_dataset(pairs, pm);
  apply_slot_assignments(split.train, seed);
  apply_slot_assignments(split.test, seed);
  apply_slot_assignments(split.val, seed);

  ensure_dir(split_dir);
  write_pairs_file(split_dir + "/train.jsonl", split.train);
  write_pairs_file(split_dir + "/test.jsonl", split.test);
  write_pairs_file(split_dir + "/val.jsonl", split.val);

  Manifest m = make_manifest("split", cfg);
  m.add_input("pairs", pairs_path);
  m.add_input("partition", partition_path);
  m.add_output("train", split_dir + "/train.jsonl");
  m.add_output("test", split_dir + "/test.jsonl");
  m.add_output("val", split_dir + "/val.jsonl");
  m.write(split_dir + "/manifest_split.json");
  return m;
}

namespace {

template <typename S>
void train_dispatch(const KeyValueConfig& cfg, const EmbeddingTable& table,
                    const PrecomputedStore* pre,
                    const std::vector<RevisionPair>& train_pairs,
                    const std::vector<RevisionPair>& val_pairs,
                    const TrainConfig& tc, const std::string& model_out,
                    const std::string& history_out) {
  std::string kind = cfg.get_string("model", "joint");
  uint64_t seed = seed_of(cfg);
  auto train_ex = make_pair_examples<S>(train_pairs, table, pre, seed);
  auto val_ex = make_pair_examples<S>(val_pairs, table, pre, seed);
  if (kind == "joint") {
    RankerHyper hyper = ranker_hyper(cfg, table.dim());
    RankerParams<S> params = RankerParams<S>::init(hyper, seed);
    TrainHistory history = train(train_ex, val_ex, params, tc);
    save_checkpoint(model_out, params, seed);
    write_text(history_out, history_tsv(history));
  } else if (kind == "baseline") {
    BaselineHyper hyper;
    hyper.input_dim = table.dim();
    hyper.hidden = static_cast<int>(cfg.get_int("hidden", hyper.hidden));
    hyper.att_dim = static_cast<int>(cfg.get_int("att_dim", hyper.att_dim));
    hyper.att_kind = att_kind(cfg);
    hyper.dropout = cfg.get_double("dropout", hyper.dropout);
    auto sentences = make_sentence_examples<S>(train_pairs, table, pre);
    BaselineParams<S> params = BaselineParams<S>::init(hyper, seed);
    TrainHistory history = train_baseline(sentences, val_ex, params, tc);
    save_checkpoint(model_out, params, seed);
    write_text(history_out, history_tsv(history));
  } else {
    throw Error("model must be 'joint' or 'baseline', got '" + kind + "'");
  }
}

}  // namespace

Manifest run_train(const KeyValueConfig& cfg) {
  std::string train_path = cfg.require("train_pairs");
  std::string val_path = cfg.require("val_pairs");
  std::string model_out = cfg.require("model_out");
  std::string history_out =
      cfg.get_string("history_out", model_out + ".history.tsv");

  EmbeddingTable table = load_table(cfg);
  std::optional<PrecomputedStore> pre;
  if (cfg.has("precomputed")) pre.emplace(cfg.require("precomputed"));

  std::vector<RevisionPair> train_pairs = read_pairs_file(train_path);
  std::vector<RevisionPair> val_pairs = read_pairs_file(val_path);
  TrainConfig tc = train_config(cfg);

  ensure_dir(dir_of(model_out));
  if (tc.precision == Precision::Double) {
    train_dispatch<double>(cfg, table, pre ? &*pre : nullptr, train_pairs,
                           val_pairs, tc, model_out, history_out);
  } else {
    train_dispatch<float>(cfg, table, pre ? &*pre : nullptr, train_pairs,
                          val_pairs, tc, model_out, history_out);
  }

  Manifest m = make_manifest("train", cfg);
  m.add_input("train_pairs", train_path);
  m.add_input("val_pairs", val_path);
  m.add_input("vectors", cfg.require("vectors"));
  if (cfg.has("precomputed")) m.add_input("precomputed", cfg.require("precomputed"));
  m.add_output("model", model_out);
  m.add_output("history", history_out);
  m.write(dir_of(model_out) + "/manifest_train.json");
  return m;
}

namespace {

template <typename S>
std::vector<PairPrediction> eval_dispatch(const std::string& model_path,
                                          ModelKind kind,
                                          const std::vector<RevisionPair>& pairs,
                                          const EmbeddingTable& table,
                                          const PrecomputedStore* pre,
                                          uint64_t slot_seed) {
  std::vector<PairPrediction> predictions;
  predictions.reserve(pairs.size());
  if (kind == ModelKind::Joint) {
    RankerParams<S> params = load_joint_checkpoint<S>(model_path);
    for (const RevisionPair& p : pairs) {
      SlotAssignment slot = slot_for(p, slot_seed);
      bool a_rev = slot.slot_a_holds == SlotContent::Revised;
      nn::Mat<S> a =
          side_matrix<S>(p, a_rev ? "revised" : "original", table, pre);
      nn::Mat<S> b =
          side_matrix<S>(p, a_rev ? "original" : "revised", table, pre);
      predictions.push_back(
          assemble_prediction(rank_pair(params, a, b), p, slot));
    }
  } else {
    BaselineParams<S> params = load_baseline_checkpoint<S>(model_path);
    for (const RevisionPair& p : pairs) {
      SlotAssignment slot = slot_for(p, slot_seed);
      bool a_rev = slot.slot_a_holds == SlotContent::Revised;
      nn::Mat<S> a =
          side_matrix<S>(p, a_rev ? "revised" : "original", table, pre);
      nn::Mat<S> b =
          side_matrix<S>(p, a_rev ? "original" : "revised", table, pre);
      predictions.push_back(
          assemble_prediction(baseline_rank_pair(params, a, b), p, slot));
    }
  }
  return predictions;
}

}  // namespace

Manifest run_eval(const KeyValueConfig& cfg) {
  std::string model_path = cfg.require("model");
  std::string pairs_path = cfg.require("eval_pairs");
  std::string predictions_out = cfg.require("predictions_out");

  EmbeddingTable table = load_table(cfg);
  std::optional<PrecomputedStore> pre;
  if (cfg.has("precomputed")) pre.emplace(cfg.require("precomputed"));
  std::vector<RevisionPair> pairs = read_pairs_file(pairs_path);

  CheckpointInfo info = peek_checkpoint(model_path);
  std::vector<PairPrediction> predictions;
  if (info.precision == Precision::Double) {
    predictions = eval_dispatch<double>(model_path, info.kind, pairs, table,
                                        pre ? &*pre : nullptr, seed_of(cfg));
  } else {
    predictions = eval_dispatch<float>(model_path, info.kind, pairs, table,
                                       pre ? &*pre : nullptr, seed_of(cfg));
  }

  ensure_dir(dir_of(predictions_out));
  write_predictions(predictions_out, predictions);

  Manifest m = make_manifest("eval", cfg);
  m.add_input("model", model_path);
  m.add_input("eval_pairs", pairs_path);
  m.add_input("vectors", cfg.require("vectors"));
  m.add_output("predictions", predictions_out);
  m.write(dir_of(predictions_out) + "/manifest_eval.json");
  return m;
}

Manifest run_analyze(const KeyValueConfig& cfg) {
  std::string predictions_path = cfg.require("predictions");
  std::string out_dir = cfg.require("analysis_dir");
  size_t k = static_cast<size_t>(cfg.get_int("confusion_k", 10));

  EmbeddingTable table = load_table(cfg);
  std::vector<PairPrediction> predictions = read_predictions(predictions_path);
  std::vector<RelationErrorRow> rows = per_relation_errors(predictions);
  ConfusionReport confusion = confusion_verbs(predictions, table, k);

  ensure_dir(out_dir);
  write_text(out_dir + "/accuracy.tsv", accuracy_to_tsv(predictions));
  write_text(out_dir + "/relation_errors.tsv", relation_errors_to_tsv(rows));
  write_text(out_dir + "/confusion.tsv", confusion_to_tsv(confusion));
  write_text(out_dir + "/analysis.json",
             analysis_to_json(predictions, rows, confusion) + "\n");

  Manifest m = make_manifest("analyze", cfg);
  m.add_input("predictions", predictions_path);
  m.add_input("vectors", cfg.require("vectors"));
  m.add_output("accuracy", out_dir + "/accuracy.tsv");
  m.add_output("relation_errors", out_dir + "/relation_errors.tsv");
  m.add_output("confusion", out_dir + "/confusion.tsv");
  m.add_output("analysis_json", out_dir + "/analysis.json");
  m.write(out_dir + "/manifest_analyze.json");
  return m;
}

Manifest run_pipeline(const KeyValueConfig& cfg) {
  std::string outdir = cfg.require("outdir");
  ensure_dir(outdir);

  KeyValueConfig stage = cfg;
  stage.set("filter_out", outdir + "/filtered.jsonl");
  stage.set("filter_report", outdir + "/filter_report.tsv");
  Manifest m_filter = run_filter(stage);

  stage.set("pairs", outdir + "/filtered.jsonl");
  stage.set("frames_out", outdir + "/labeled.jsonl");
  stage.set("frames_stats", outdir + "/relation_stats.tsv");
  Manifest m_frames = run_frames(stage);

  stage.set("pairs", outdir + "/labeled.jsonl");
  stage.set("split_dir", outdir + "/splits");
  Manifest m_split = run_split(stage);

  stage.set("train_pairs", outdir + "/splits/train.jsonl");
  stage.set("val_pairs", outdir + "/splits/val.jsonl");
  stage.set("model_out", outdir + "/model.ckpt");
  stage.set("history_out", outdir + "/train_history.tsv");
  Manifest m_train = run_train(stage);

  std::string eval_split = cfg.get_string("eval_split", "test");
  if (eval_split != "train" && eval_split != "test" && eval_split != "val")
    throw Error("eval_split must be train, test or val");
  stage.set("model", outdir + "/model.ckpt");
  stage.set("eval_pairs", outdir + "/splits/" + eval_split + ".jsonl");
  stage.set("predictions_out", outdir + "/predictions.jsonl");
  Manifest m_eval = run_eval(stage);

  stage.set("predictions", outdir + "/predictions.jsonl");
  stage.set("analysis_dir", outdir + "/analysis");
  Manifest m_analyze = run_analyze(stage);

  Manifest m = make_manifest("pipeline", cfg);
  m.add_input("pairs", cfg.require("pairs"));
  m.add_input("dict", cfg.require("dict"));
  m.add_input("frame_graph", cfg.require("frame_graph"));
  m.add_input("partition", cfg.require("partition"));
  m.add_input("vectors", cfg.require("vectors"));
  for (const Manifest* sm :
       {&m_filter, &m_frames, &m_split, &m_train, &m_eval, &m_analyze}) {
    for (const auto& [label, path] : sm->outputs)
      m.add_output(sm->command + "." + label, path);
  }
  m.write(outdir + "/manifest.json");
  return m;
}

}  // namespace stages
}  // namespace revmine
