#pragma once

#include "revmine/config.hpp"
#include "revmine/manifest.hpp"

namespace revmine {
namespace stages {

// Pipeline stage runners. Each reads its paths and knobs from the merged
// config (file entries plus CLI overrides), writes its outputs plus a
// per-stage manifest, and returns that manifest.
//
// Config keys, shared: pairs, dict, frame_graph, partition, vectors, outdir,
// seed, min_len, max_len, max_edit_distance, model, input_dim, hidden,
// joint_hidden, att_dim, att_kind, dropout, tie_weights, epochs, batch_size,
// learning_rate, precision, oov_policy, precomputed, eval_split,
// confusion_k.
// Per-stage outputs: filter_out, filter_report, frames_out, frames_stats,
// split_dir, model_out, history_out, eval_pairs, predictions_out,
// analysis_dir.

Manifest run_filter(const KeyValueConfig& cfg);
Manifest run_frames(const KeyValueConfig& cfg);
Manifest run_split(const KeyValueConfig& cfg);
Manifest run_train(const KeyValueConfig& cfg);
Manifest run_eval(const KeyValueConfig& cfg);
Manifest run_analyze(const KeyValueConfig& cfg);
Manifest run_pipeline(const KeyValueConfig& cfg);

}  // namespace stages
}  // namespace revmine
