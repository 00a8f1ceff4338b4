#pragma once

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>
#include <vector>

#include "revmine/analysis.hpp"
#include "revmine/dataset.hpp"
#include "revmine/embed.hpp"
#include "revmine/nn.hpp"

namespace revmine {

enum class Precision { Single, Double };

struct TrainConfig {
  int epochs = 5;
  int batch_size = 32;
  double learning_rate = 1e-5;
  uint64_t seed = 0;
  Precision precision = Precision::Double;

  void validate() const {
    if (epochs < 1) throw Error("train config requires epochs >= 1");
    if (batch_size < 1) throw Error("train config requires batch_size >= 1");
    if (learning_rate <= 0.0)
      throw Error("train config requires learning_rate > 0");
  }
};

// Architecture scale. Hidden sizes are per direction; a bidirectional layer
// emits twice the stated width per timestep.
struct RankerHyper {
  int input_dim = 300;
  int hidden = 256;        // layer-1 and layer-2 modules
  int joint_hidden = 256;  // joint module
  int att_dim = 0;         // 0 = use 2*hidden
  nn::AttentionKind att_kind = nn::AttentionKind::ProjTanh;
  double dropout = 0.2;  // embedded inputs only
  bool tie_weights = false;

  int att_dim_effective() const { return att_dim > 0 ? att_dim : 2 * hidden; }
  void validate() const {
    if (input_dim < 1 || hidden < 1 || joint_hidden < 1 || att_dim < 0)
      throw Error("ranker dimensions must be positive");
    if (dropout < 0.0 || dropout >= 1.0)
      throw Error("dropout rate must be in [0, 1)");
  }
};

// All trainable weights of the joint pairwise model. Under tie_weights the
// two layer-1 encoders share one parameter set (likewise layer-2), and the
// joint layer consumes the SUM of the two encodings instead of their
// concatenation, which is the tied form of a concat whose two input-weight
// halves are constrained equal. Pooling and scoring weights are always
// shared between the sides.
template <typename S>
struct RankerParams {
  RankerHyper hyper;
  nn::BiLstm<S> enc_a, enc_b;      // layer 1
  nn::BiLstm<S> joint;             // joint layer over both encodings
  nn::BiLstm<S> reenc_a, reenc_b;  // layer 2
  nn::Attention<S> att;            // shared pooling
  nn::Vec<S> score_w;              // shared scoring vector

  int joint_input_dim() const {
    return hyper.tie_weights ? 2 * hyper.hidden : 4 * hyper.hidden;
  }
  int reenc_input_dim() const {
    return 2 * hyper.joint_hidden + 2 * hyper.hidden;
  }

  const nn::BiLstm<S>& enc_for_b() const {
    return hyper.tie_weights ? enc_a : enc_b;
  }
  const nn::BiLstm<S>& reenc_for_b() const {
    return hyper.tie_weights ? reenc_a : reenc_b;
  }

  static RankerParams zeros(const RankerHyper& h) {
    h.validate();
    RankerParams p;
    p.hyper = h;
    p.enc_a = nn::BiLstm<S>::zeros(h.input_dim, h.hidden);
    if (!h.tie_weights) p.enc_b = nn::BiLstm<S>::zeros(h.input_dim, h.hidden);
    p.joint = nn::BiLstm<S>::zeros(p.joint_input_dim(), h.joint_hidden);
    p.reenc_a = nn::BiLstm<S>::zeros(p.reenc_input_dim(), h.hidden);
    if (!h.tie_weights)
      p.reenc_b = nn::BiLstm<S>::zeros(p.reenc_input_dim(), h.hidden);
    p.att = nn::Attention<S>::zeros(h.att_kind, 2 * h.hidden,
                                    h.att_dim_effective());
    p.score_w = nn::Vec<S>::Zero(2 * h.hidden);
    return p;
  }

  static RankerParams init(const RankerHyper& h, uint64_t seed) {
    RankerParams p = zeros(h);
    std::mt19937_64 rng(util::mix64(seed));
    nn::init_bilstm(p.enc_a, rng);
    if (!h.tie_weights) nn::init_bilstm(p.enc_b, rng);
    nn::init_bilstm(p.joint, rng);
    nn::init_bilstm(p.reenc_a, rng);
    if (!h.tie_weights) nn::init_bilstm(p.reenc_b, rng);
    if (h.att_kind == nn::AttentionKind::ProjTanh)
      nn::init_uniform<S>(p.att.proj, 2 * h.hidden, rng);
    nn::init_uniform<S>(p.att.context, p.att.context.size(), rng);
    nn::init_uniform<S>(p.score_w, 2 * h.hidden, rng);
    return p;
  }

  void set_zero() {
    enc_a.set_zero();
    enc_b.set_zero();
    joint.set_zero();
    reenc_a.set_zero();
    reenc_b.set_zero();
    att.set_zero();
    score_w.setZero();
  }

  void fill_constant(S value) {
    visit([value](const char*, auto& t) { t.setConstant(value); });
  }

  // Visits every ACTIVE tensor in a fixed order (tied duplicates and the
  // unused projection of dot attention are skipped). This order defines the
  // flat parameter layout used by the optimizer, the checkpoint format and
  // the finite-difference checks.
  template <typename Fn>
  void visit(Fn&& fn) {
    visit_impl(*this, fn);
  }
  template <typename Fn>
  void visit(Fn&& fn) const {
    visit_impl(*this, fn);
  }

  Eigen::Index param_count() const {
    Eigen::Index n = 0;
    visit([&n](const char*, const auto& t) { n += t.size(); });
    return n;
  }

  nn::Vec<S> flatten() const {
    nn::Vec<S> out(param_count());
    Eigen::Index at = 0;
    visit([&](const char*, const auto& t) {
      std::copy(t.data(), t.data() + t.size(), out.data() + at);
      at += t.size();
    });
    return out;
  }

  void unflatten(const nn::Vec<S>& flat) {
    if (flat.size() != param_count())
      throw Error("flat parameter vector has wrong length");
    Eigen::Index at = 0;
    visit([&](const char*, auto& t) {
      std::copy(flat.data() + at, flat.data() + at + t.size(), t.data());
      at += t.size();
    });
  }

  bool all_finite() const {
    bool ok = true;
    visit([&ok](const char*, const auto& t) { ok = ok && t.allFinite(); });
    return ok;
  }

 private:
  template <typename Self, typename Fn>
  static void visit_impl(Self& self, Fn& fn) {
    auto cell = [&fn](const char* base, auto& c) {
      std::string n(base);
      fn((n + ".w_in").c_str(), c.w_in);
      fn((n + ".w_rec").c_str(), c.w_rec);
      fn((n + ".bias").c_str(), c.bias);
    };
    cell("enc_a.fwd", self.enc_a.fwd);
    cell("enc_a.bwd", self.enc_a.bwd);
    if (!self.hyper.tie_weights) {
      cell("enc_b.fwd", self.enc_b.fwd);
      cell("enc_b.bwd", self.enc_b.bwd);
    }
    cell("joint.fwd", self.joint.fwd);
    cell("joint.bwd", self.joint.bwd);
    cell("reenc_a.fwd", self.reenc_a.fwd);
    cell("reenc_a.bwd", self.reenc_a.bwd);
    if (!self.hyper.tie_weights) {
      cell("reenc_b.fwd", self.reenc_b.fwd);
      cell("reenc_b.bwd", self.reenc_b.bwd);
    }
    if (self.hyper.att_kind == nn::AttentionKind::ProjTanh)
      fn("att.proj", self.att.proj);
    fn("att.context", self.att.context);
    fn("score_w", self.score_w);
  }
};

template <typename S>
struct PairProb {
  S a, b;
};

// Two-way softmax over the slot scores, computed stably.
template <typename S>
PairProb<S> pair_softmax(S score_a, S score_b) {
  S m = std::max(score_a, score_b);
  S ea = std::exp(score_a - m);
  S eb = std::exp(score_b - m);
  S z = ea + eb;
  return {ea / z, eb / z};
}

// Everything one forward pass produced, sufficient to run the exact
// backward pass.
template <typename S>
struct ForwardTrace {
  int len_a = 0, len_b = 0, t_max = 0;
  nn::BiLstmTrace<S> enc_a_tr, enc_b_tr, joint_tr, reenc_a_tr, reenc_b_tr;
  nn::Mat<S> enc_a, enc_b;      // per-side layer-1 outputs, true length rows
  nn::Mat<S> joint_in;          // T_max x joint input dim
  nn::Mat<S> joint_h;           // T_max x 2*joint_hidden
  nn::Mat<S> reenc_a, reenc_b;  // truncated to the side's true length
  nn::AttentionTrace<S> att_a_tr, att_b_tr;
  nn::Vec<S> pooled_a, pooled_b;
  S score_a = 0, score_b = 0;
  S prob_a = 0, prob_b = 0;
};

// The joint pass: encode each side, zero-pad to the longer length, run the
// joint layer over the per-timestep combination, re-encode each side from
// [joint ; own encoding], pool with attention over the side's true length,
// then score and softmax the pair. Explicit lengths mark trailing rows of
// pre-padded inputs as padding; 0 means every row is real.
template <typename S>
ForwardTrace<S> forward(const RankerParams<S>& p, const nn::Mat<S>& in_a,
                        const nn::Mat<S>& in_b, int len_a = 0, int len_b = 0) {
  const RankerHyper& h = p.hyper;
  if (in_a.rows() == 0 || in_b.rows() == 0)
    throw Error("forward requires nonempty inputs on both sides");
  if (in_a.cols() != h.input_dim)
    throw Error("shape error: S_A has " + std::to_string(in_a.cols()) +
                " columns, model expects " + std::to_string(h.input_dim));
  if (in_b.cols() != h.input_dim)
    throw Error("shape error: S_B has " + std::to_string(in_b.cols()) +
                " columns, model expects " + std::to_string(h.input_dim));
  if (len_a < 0 || len_a > in_a.rows() || len_b < 0 || len_b > in_b.rows())
    throw Error("explicit sequence length out of range");

  ForwardTrace<S> t;
  t.len_a = len_a > 0 ? len_a : static_cast<int>(in_a.rows());
  t.len_b = len_b > 0 ? len_b : static_cast<int>(in_b.rows());
  t.t_max = std::max(t.len_a, t.len_b);
  const int d1 = 2 * h.hidden;

  t.enc_a = nn::bilstm_forward(p.enc_a, nn::Mat<S>(in_a.topRows(t.len_a)),
                               &t.enc_a_tr);
  t.enc_b = nn::bilstm_forward(p.enc_for_b(),
                               nn::Mat<S>(in_b.topRows(t.len_b)), &t.enc_b_tr);

  nn::Mat<S> enc_a_pad = nn::Mat<S>::Zero(t.t_max, d1);
  nn::Mat<S> enc_b_pad = nn::Mat<S>::Zero(t.t_max, d1);
  enc_a_pad.topRows(t.len_a) = t.enc_a;
  enc_b_pad.topRows(t.len_b) = t.enc_b;

  if (h.tie_weights) {
    t.joint_in = enc_a_pad + enc_b_pad;
  } else {
    t.joint_in.resize(t.t_max, 2 * d1);
    t.joint_in.leftCols(d1) = enc_a_pad;
    t.joint_in.rightCols(d1) = enc_b_pad;
  }
  t.joint_h = nn::bilstm_forward(p.joint, t.joint_in, &t.joint_tr);

  const int dj = 2 * h.joint_hidden;
  nn::Mat<S> re_in_a(t.t_max, dj + d1);
  re_in_a.leftCols(dj) = t.joint_h;
  re_in_a.rightCols(d1) = enc_a_pad;
  nn::Mat<S> re_full_a = nn::bilstm_forward(p.reenc_a, re_in_a, &t.reenc_a_tr);
  t.reenc_a = re_full_a.topRows(t.len_a);

  nn::Mat<S> re_in_b(t.t_max, dj + d1);
  re_in_b.leftCols(dj) = t.joint_h;
  re_in_b.rightCols(d1) = enc_b_pad;
  nn::Mat<S> re_full_b =
      nn::bilstm_forward(p.reenc_for_b(), re_in_b, &t.reenc_b_tr);
  t.reenc_b = re_full_b.topRows(t.len_b);

  t.pooled_a = nn::attention_forward(p.att, t.reenc_a, &t.att_a_tr);
  t.pooled_b = nn::attention_forward(p.att, t.reenc_b, &t.att_b_tr);
  t.score_a = p.score_w.dot(t.pooled_a);
  t.score_b = p.score_w.dot(t.pooled_b);
  PairProb<S> prob = pair_softmax(t.score_a, t.score_b);
  t.prob_a = prob.a;
  t.prob_b = prob.b;
  return t;
}

// Cross-entropy against the slot holding the revised sentence:
// -log l_gold, evaluated in log-sum-exp form.
template <typename S>
S loss(const ForwardTrace<S>& t, int gold_slot) {
  if (gold_slot != 0 && gold_slot != 1)
    throw Error("gold slot must be 0 (A) or 1 (B)");
  S m = std::max(t.score_a, t.score_b);
  S lse = m + std::log(std::exp(t.score_a - m) + std::exp(t.score_b - m));
  S gold_score = gold_slot == 0 ? t.score_a : t.score_b;
  return lse - gold_score;
}

// Exact reverse pass; parameter gradients accumulate into grad, which must
// share the params' hyperparameters.
template <typename S>
void backward(const RankerParams<S>& p, const ForwardTrace<S>& t,
              int gold_slot, RankerParams<S>& grad) {
  const RankerHyper& h = p.hyper;
  const int d1 = 2 * h.hidden;
  const int dj = 2 * h.joint_hidden;

  S dscore_a = t.prob_a - (gold_slot == 0 ? S(1) : S(0));
  S dscore_b = t.prob_b - (gold_slot == 1 ? S(1) : S(0));
  grad.score_w += dscore_a * t.pooled_a + dscore_b * t.pooled_b;
  nn::Vec<S> dpooled_a = dscore_a * p.score_w;
  nn::Vec<S> dpooled_b = dscore_b * p.score_w;

  nn::Mat<S> dreenc_a =
      nn::attention_backward(p.att, t.att_a_tr, dpooled_a, grad.att);
  nn::Mat<S> dreenc_b =
      nn::attention_backward(p.att, t.att_b_tr, dpooled_b, grad.att);

  nn::Mat<S> dre_full_a = nn::Mat<S>::Zero(t.t_max, d1);
  dre_full_a.topRows(t.len_a) = dreenc_a;
  nn::Mat<S> dre_in_a = nn::bilstm_backward(p.reenc_a, t.reenc_a_tr,
                                            dre_full_a, grad.reenc_a);

  nn::BiLstm<S>& reenc_b_grad = h.tie_weights ? grad.reenc_a : grad.reenc_b;
  nn::Mat<S> dre_full_b = nn::Mat<S>::Zero(t.t_max, d1);
  dre_full_b.topRows(t.len_b) = dreenc_b;
  nn::Mat<S> dre_in_b = nn::bilstm_backward(p.reenc_for_b(), t.reenc_b_tr,
                                            dre_full_b, reenc_b_grad);

  nn::Mat<S> djoint = dre_in_a.leftCols(dj) + dre_in_b.leftCols(dj);
  nn::Mat<S> djoint_in =
      nn::bilstm_backward(p.joint, t.joint_tr, djoint, grad.joint);

  nn::Mat<S> denc_a_pad = dre_in_a.rightCols(d1);
  nn::Mat<S> denc_b_pad = dre_in_b.rightCols(d1);
  if (h.tie_weights) {
    denc_a_pad += djoint_in;
    denc_b_pad += djoint_in;
  } else {
    denc_a_pad += djoint_in.leftCols(d1);
    denc_b_pad += djoint_in.rightCols(d1);
  }

  nn::bilstm_backward(p.enc_a, t.enc_a_tr,
                      nn::Mat<S>(denc_a_pad.topRows(t.len_a)), grad.enc_a);
  nn::BiLstm<S>& enc_b_grad = h.tie_weights ? grad.enc_a : grad.enc_b;
  nn::bilstm_backward(p.enc_for_b(), t.enc_b_tr,
                      nn::Mat<S>(denc_b_pad.topRows(t.len_b)), enc_b_grad);
}

// ---------------------------------------------------------------------------
// Training.
// ---------------------------------------------------------------------------

// One training/evaluation instance: embedded slot contents and which slot
// holds the revised sentence (0 = A, 1 = B).
template <typename S>
struct PairExample {
  std::string pair_id;
  nn::Mat<S> a, b;
  int gold_slot = 0;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
};

template <typename S>
struct RankOutcome {
  S prob_a = 0, prob_b = 0;
  char predicted_slot = 'A';
  bool tie = false;
};

template <typename S>
RankOutcome<S> rank_pair(const RankerParams<S>& params, const nn::Mat<S>& a,
                         const nn::Mat<S>& b) {
  ForwardTrace<S> t = forward(params, a, b);
  RankOutcome<S> out;
  out.prob_a = t.prob_a;
  out.prob_b = t.prob_b;
  out.tie = t.prob_a == t.prob_b;
  out.predicted_slot = t.prob_a >= t.prob_b ? 'A' : 'B';
  return out;
}

// Pair accuracy with exact ties scored as incorrect.
template <typename S>
double evaluate_pairs(const RankerParams<S>& params,
                      const std::vector<PairExample<S>>& examples) {
  if (examples.empty()) throw Error("cannot evaluate zero examples");
  size_t correct = 0;
  for (const PairExample<S>& ex : examples) {
    RankOutcome<S> out = rank_pair(params, ex.a, ex.b);
    char gold = ex.gold_slot == 0 ? 'A' : 'B';
    if (!out.tie && out.predicted_slot == gold) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

namespace detail {

template <typename P>
std::string param_norms(const P& params) {
  std::string out;
  params.visit([&out](const char* name, const auto& t) {
    out += std::string(" |") + name + "|=" + std::to_string(t.norm());
  });
  return out;
}

}  // namespace detail

// Mini-batch training with Adam. Single-threaded over the update sequence;
// dropout masks are resampled per example per epoch and never applied at
// evaluation. Fixed seed gives an identical trajectory.
template <typename S>
TrainHistory train(const std::vector<PairExample<S>>& train_set,
                   const std::vector<PairExample<S>>& val_set,
                   RankerParams<S>& params, const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.empty()) throw Error("training set is empty");
  std::mt19937_64 rng(util::mix64(cfg.seed ^ 0x72616e6b6572ULL));
  nn::Vec<S> theta = params.flatten();
  nn::Adam<S> opt(cfg.learning_rate, theta.size());
  RankerParams<S> grad = RankerParams<S>::zeros(params.hyper);
  TrainHistory history;

  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    size_t seen = 0;
    for (size_t batch_start = 0, batch_idx = 0; batch_start < order.size();
         batch_start += cfg.batch_size, ++batch_idx) {
      size_t batch_end =
          std::min(order.size(), batch_start + cfg.batch_size);
      grad.set_zero();
      for (size_t k = batch_start; k < batch_end; ++k) {
        const PairExample<S>& ex = train_set[order[k]];
        nn::Mat<S> a = ex.a, b = ex.b;
        if (params.hyper.dropout > 0.0) {
          a = a.cwiseProduct(
              nn::dropout_mask<S>(a.rows(), a.cols(), params.hyper.dropout, rng));
          b = b.cwiseProduct(
              nn::dropout_mask<S>(b.rows(), b.cols(), params.hyper.dropout, rng));
        }
        ForwardTrace<S> trace = forward(params, a, b);
        S l = loss(trace, ex.gold_slot);
        if (!std::isfinite(static_cast<double>(l))) {
          throw Error("training aborted: non-finite loss at epoch " +
                      std::to_string(epoch) + " batch " +
                      std::to_string(batch_idx) + " pair " + ex.pair_id +
                      ";" + detail::param_norms(params));
        }
        loss_sum += static_cast<double>(l);
        ++seen;
        backward(params, trace, ex.gold_slot, grad);
      }
      S scale = S(1) / S(batch_end - batch_start);
      grad.visit([scale](const char*, auto& t) { t *= scale; });
      nn::Vec<S> g = grad.flatten();
      opt.update(theta, g);
      params.unflatten(theta);
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(seen);
    stats.val_accuracy = val_set.empty() ? 0.0 : evaluate_pairs(params, val_set);
    history.epochs.push_back(stats);
  }
  return history;
}

// ---------------------------------------------------------------------------
// Per-sentence baseline: one shared BiLSTM, attention pooling, sigmoid
// score, binary cross-entropy on 0=original / 1=revised. Pair decisions
// rank the two independent scores.
// ---------------------------------------------------------------------------

struct BaselineHyper {
  int input_dim = 300;
  int hidden = 256;
  int att_dim = 0;
  nn::AttentionKind att_kind = nn::AttentionKind::ProjTanh;
  double dropout = 0.2;

  int att_dim_effective() const { return att_dim > 0 ? att_dim : 2 * hidden; }
};

template <typename S>
struct BaselineParams {
  BaselineHyper hyper;
  nn::BiLstm<S> enc;
  nn::Attention<S> att;
  nn::Vec<S> score_w;
  nn::Vec<S> score_bias;  // single element

  static BaselineParams zeros(const BaselineHyper& h) {
    BaselineParams p;
    p.hyper = h;
    p.enc = nn::BiLstm<S>::zeros(h.input_dim, h.hidden);
    p.att = nn::Attention<S>::zeros(h.att_kind, 2 * h.hidden,
                                    h.att_dim_effective());
    p.score_w = nn::Vec<S>::Zero(2 * h.hidden);
    p.score_bias = nn::Vec<S>::Zero(1);
    return p;
  }

  static BaselineParams init(const BaselineHyper& h, uint64_t seed) {
    BaselineParams p = zeros(h);
    std::mt19937_64 rng(util::mix64(seed ^ 0x62617365ULL));
    nn::init_bilstm(p.enc, rng);
    if (h.att_kind == nn::AttentionKind::ProjTanh)
      nn::init_uniform<S>(p.att.proj, 2 * h.hidden, rng);
    nn::init_uniform<S>(p.att.context, p.att.context.size(), rng);
    nn::init_uniform<S>(p.score_w, 2 * h.hidden, rng);
    return p;
  }

  void set_zero() {
    enc.set_zero();
    att.set_zero();
    score_w.setZero();
    score_bias.setZero();
  }

  template <typename Fn>
  void visit(Fn&& fn) {
    visit_impl(*this, fn);
  }
  template <typename Fn>
  void visit(Fn&& fn) const {
    visit_impl(*this, fn);
  }

  Eigen::Index param_count() const {
    Eigen::Index n = 0;
    visit([&n](const char*, const auto& t) { n += t.size(); });
    return n;
  }

  nn::Vec<S> flatten() const {
    nn::Vec<S> out(param_count());
    Eigen::Index at = 0;
    visit([&](const char*, const auto& t) {
      std::copy(t.data(), t.data() + t.size(), out.data() + at);
      at += t.size();
    });
    return out;
  }

  void unflatten(const nn::Vec<S>& flat) {
    if (flat.size() != param_count())
      throw Error("flat parameter vector has wrong length");
    Eigen::Index at = 0;
    visit([&](const char*, auto& t) {
      std::copy(flat.data() + at, flat.data() + at + t.size(), t.data());
      at += t.size();
    });
  }

 private:
  template <typename Self, typename Fn>
  static void visit_impl(Self& self, Fn& fn) {
    fn("enc.fwd.w_in", self.enc.fwd.w_in);
    fn("enc.fwd.w_rec", self.enc.fwd.w_rec);
    fn("enc.fwd.bias", self.enc.fwd.bias);
    fn("enc.bwd.w_in", self.enc.bwd.w_in);
    fn("enc.bwd.w_rec", self.enc.bwd.w_rec);
    fn("enc.bwd.bias", self.enc.bwd.bias);
    if (self.hyper.att_kind == nn::AttentionKind::ProjTanh)
      fn("att.proj", self.att.proj);
    fn("att.context", self.att.context);
    fn("score_w", self.score_w);
    fn("score_bias", self.score_bias);
  }
};

template <typename S>
struct BaselineTrace {
  nn::BiLstmTrace<S> enc_tr;
  nn::AttentionTrace<S> att_tr;
  nn::Mat<S> enc;
  nn::Vec<S> pooled;
  S logit = 0;
};

template <typename S>
BaselineTrace<S> baseline_forward(const BaselineParams<S>& p,
                                  const nn::Mat<S>& x) {
  if (x.rows() == 0) throw Error("baseline forward requires a nonempty input");
  if (x.cols() != p.hyper.input_dim)
    throw Error("shape error: sentence matrix has " +
                std::to_string(x.cols()) + " columns, model expects " +
                std::to_string(p.hyper.input_dim));
  BaselineTrace<S> t;
  t.enc = nn::bilstm_forward(p.enc, x, &t.enc_tr);
  t.pooled = nn::attention_forward(p.att, t.enc, &t.att_tr);
  t.logit = p.score_w.dot(t.pooled) + p.score_bias[0];
  return t;
}

template <typename S>
S baseline_score(const BaselineParams<S>& p, const nn::Mat<S>& x) {
  return nn::sigmoid(baseline_forward(p, x).logit);
}

// Numerically stable binary cross-entropy on the logit.
template <typename S>
S baseline_loss(S logit, int label) {
  S z = logit;
  S y = S(label);
  return std::max(z, S(0)) - z * y + std::log1p(std::exp(-std::abs(z)));
}

template <typename S>
void baseline_backward(const BaselineParams<S>& p, const BaselineTrace<S>& t,
                       int label, BaselineParams<S>& grad) {
  S dlogit = nn::sigmoid(t.logit) - S(label);
  grad.score_w += dlogit * t.pooled;
  grad.score_bias[0] += dlogit;
  nn::Vec<S> dpooled = dlogit * p.score_w;
  nn::Mat<S> denc = nn::attention_backward(p.att, t.att_tr, dpooled, grad.att);
  nn::bilstm_backward(p.enc, t.enc_tr, denc, grad.enc);
}

template <typename S>
struct SentenceExample {
  nn::Mat<S> x;
  int label = 0;  // 1 = revised
};

// Rank the two slots by their independent scores; exact ties are incorrect.
template <typename S>
double baseline_evaluate_pairs(const BaselineParams<S>& params,
                               const std::vector<PairExample<S>>& examples) {
  if (examples.empty()) throw Error("cannot evaluate zero examples");
  size_t correct = 0;
  for (const PairExample<S>& ex : examples) {
    S sa = baseline_forward(params, ex.a).logit;
    S sb = baseline_forward(params, ex.b).logit;
    if (sa == sb) continue;  // tie
    char predicted = sa > sb ? 'A' : 'B';
    char gold = ex.gold_slot == 0 ? 'A' : 'B';
    if (predicted == gold) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

template <typename S>
TrainHistory train_baseline(const std::vector<SentenceExample<S>>& train_set,
                            const std::vector<PairExample<S>>& val_pairs,
                            BaselineParams<S>& params, const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.empty()) throw Error("training set is empty");
  std::mt19937_64 rng(util::mix64(cfg.seed ^ 0x626c73ULL));
  nn::Vec<S> theta = params.flatten();
  nn::Adam<S> opt(cfg.learning_rate, theta.size());
  BaselineParams<S> grad = BaselineParams<S>::zeros(params.hyper);
  TrainHistory history;

  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    size_t seen = 0;
    for (size_t batch_start = 0, batch_idx = 0; batch_start < order.size();
         batch_start += cfg.batch_size, ++batch_idx) {
      size_t batch_end = std::min(order.size(), batch_start + cfg.batch_size);
      grad.set_zero();
      for (size_t k = batch_start; k < batch_end; ++k) {
        const SentenceExample<S>& ex = train_set[order[k]];
        nn::Mat<S> x = ex.x;
        if (params.hyper.dropout > 0.0) {
          x = x.cwiseProduct(
              nn::dropout_mask<S>(x.rows(), x.cols(), params.hyper.dropout, rng));
        }
        BaselineTrace<S> trace = baseline_forward(params, x);
        S l = baseline_loss(trace.logit, ex.label);
        if (!std::isfinite(static_cast<double>(l))) {
          throw Error("baseline training aborted: non-finite loss at epoch " +
                      std::to_string(epoch) + " batch " +
                      std::to_string(batch_idx) + ";" +
                      detail::param_norms(params));
        }
        loss_sum += static_cast<double>(l);
        ++seen;
        baseline_backward(params, trace, ex.label, grad);
      }
      S scale = S(1) / S(batch_end - batch_start);
      grad.visit([scale](const char*, auto& t) { t *= scale; });
      nn::Vec<S> g = grad.flatten();
      opt.update(theta, g);
      params.unflatten(theta);
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(seen);
    stats.val_accuracy =
        val_pairs.empty() ? 0.0 : baseline_evaluate_pairs(params, val_pairs);
    history.epochs.push_back(stats);
  }
  return history;
}

// ---------------------------------------------------------------------------
// Prediction assembly and checkpoints.
// ---------------------------------------------------------------------------

template <typename S>
nn::Mat<S> to_scalar(const Eigen::MatrixXd& m) {
  return m.template cast<S>();
}

// Metadata the analysis stage groups by: frame relation and root lemmas.
inline void fill_prediction_metadata(PairPrediction& pred,
                                     const RevisionPair& pair) {
  pred.pair_id = pair.pair_id;
  if (pair.relation) pred.relation = relation_label_from_string(*pair.relation);
  if (pair.original.annotated())
    pred.root_verb_original = util::lower_ascii(
        pair.original.tokens[pair.original.root_index()].lemma);
  if (pair.revised.annotated())
    pred.root_verb_revised =
        util::lower_ascii(pair.revised.tokens[pair.revised.root_index()].lemma);
}

template <typename S>
PairPrediction assemble_prediction(const RankOutcome<S>& out,
                                   const RevisionPair& pair,
                                   const SlotAssignment& slot) {
  PairPrediction pred;
  pred.l_a = static_cast<double>(out.prob_a);
  pred.l_b = static_cast<double>(out.prob_b);
  pred.predicted_slot = out.predicted_slot;
  pred.gold_slot = slot.gold_revised_slot();
  pred.tie = out.tie;
  pred.correct = !out.tie && pred.predicted_slot == pred.gold_slot;
  fill_prediction_metadata(pred, pair);
  return pred;
}

// Embeds a pair per its slot assignment and builds the full prediction
// record, including the metadata the analysis stage groups by.
template <typename S>
PairPrediction predict_pair(const RankerParams<S>& params,
                            const RevisionPair& pair,
                            const SlotAssignment& slot,
                            const EmbeddingTable& table) {
  const AnnotatedSentence& slot_a_sentence =
      slot.slot_a_holds == SlotContent::Revised ? pair.revised : pair.original;
  const AnnotatedSentence& slot_b_sentence =
      slot.slot_a_holds == SlotContent::Revised ? pair.original : pair.revised;
  nn::Mat<S> a =
      to_scalar<S>(embed_sentence(embedding_tokens(slot_a_sentence), table));
  nn::Mat<S> b =
      to_scalar<S>(embed_sentence(embedding_tokens(slot_b_sentence), table));
  return assemble_prediction(rank_pair(params, a, b), pair, slot);
}

// Baseline rank of two already-embedded slots; scores are the independent
// per-slot sigmoids.
template <typename S>
RankOutcome<S> baseline_rank_pair(const BaselineParams<S>& params,
                                  const nn::Mat<S>& a, const nn::Mat<S>& b) {
  S sa = nn::sigmoid(baseline_forward(params, a).logit);
  S sb = nn::sigmoid(baseline_forward(params, b).logit);
  RankOutcome<S> out;
  out.prob_a = sa;
  out.prob_b = sb;
  out.tie = sa == sb;
  out.predicted_slot = sa >= sb ? 'A' : 'B';
  return out;
}

template <typename S>
PairPrediction baseline_predict_pair(const BaselineParams<S>& params,
                                     const RevisionPair& pair,
                                     const SlotAssignment& slot,
                                     const EmbeddingTable& table) {
  const AnnotatedSentence& slot_a_sentence =
      slot.slot_a_holds == SlotContent::Revised ? pair.revised : pair.original;
  const AnnotatedSentence& slot_b_sentence =
      slot.slot_a_holds == SlotContent::Revised ? pair.original : pair.revised;
  nn::Mat<S> a =
      to_scalar<S>(embed_sentence(embedding_tokens(slot_a_sentence), table));
  nn::Mat<S> b =
      to_scalar<S>(embed_sentence(embedding_tokens(slot_b_sentence), table));
  return assemble_prediction(baseline_rank_pair(params, a, b), pair, slot);
}

enum class ModelKind { Joint, Baseline };

struct CheckpointInfo {
  ModelKind kind = ModelKind::Joint;
  Precision precision = Precision::Double;
  uint64_t seed = 0;
};

CheckpointInfo peek_checkpoint(const std::string& path);

void save_checkpoint(const std::string& path, const RankerParams<double>& p,
                     uint64_t seed);
void save_checkpoint(const std::string& path, const RankerParams<float>& p,
                     uint64_t seed);
void save_checkpoint(const std::string& path, const BaselineParams<double>& p,
                     uint64_t seed);
void save_checkpoint(const std::string& path, const BaselineParams<float>& p,
                     uint64_t seed);

template <typename S>
RankerParams<S> load_joint_checkpoint(const std::string& path,
                                      uint64_t* seed = nullptr);
template <typename S>
BaselineParams<S> load_baseline_checkpoint(const std::string& path,
                                           uint64_t* seed = nullptr);

}  // namespace revmine
