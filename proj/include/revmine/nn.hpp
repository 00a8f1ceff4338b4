#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

#include "revmine/util.hpp"

namespace revmine {
namespace nn {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <typename S>
S sigmoid(S x) {
  if (x >= S(0)) return S(1) / (S(1) + std::exp(-x));
  S e = std::exp(x);
  return e / (S(1) + e);
}

// ---------------------------------------------------------------------------
// Single-direction LSTM. Gate blocks are stacked [input; forget; cell; output]
// in the 4H rows of w_in/w_rec/bias.
// ---------------------------------------------------------------------------

template <typename S>
struct LstmCell {
  Mat<S> w_in;   // 4H x in
  Mat<S> w_rec;  // 4H x H
  Vec<S> bias;   // 4H

  int hidden() const { return static_cast<int>(w_rec.cols()); }
  int input() const { return static_cast<int>(w_in.cols()); }

  static LstmCell zeros(int input_dim, int hidden_dim) {
    LstmCell c;
    c.w_in = Mat<S>::Zero(4 * hidden_dim, input_dim);
    c.w_rec = Mat<S>::Zero(4 * hidden_dim, hidden_dim);
    c.bias = Vec<S>::Zero(4 * hidden_dim);
    return c;
  }

  void set_zero() {
    w_in.setZero();
    w_rec.setZero();
    bias.setZero();
  }
};

template <typename S>
struct LstmTrace {
  Mat<S> x;      // T x in, input order
  Mat<S> h;      // T x H, processing order
  Mat<S> c;      // T x H, processing order
  Mat<S> gates;  // T x 4H, processing order, post-activation
  bool reverse = false;
};

// Runs the recurrence over the rows of x (reversed when reverse is set) and
// returns hidden states re-aligned to input order.
template <typename S>
Mat<S> lstm_forward(const LstmCell<S>& cell, const Mat<S>& x, bool reverse,
                    LstmTrace<S>* trace) {
  const int t_len = static_cast<int>(x.rows());
  const int hid = cell.hidden();
  if (x.cols() != cell.input())
    throw Error("lstm input has " + std::to_string(x.cols()) +
                " columns, cell expects " + std::to_string(cell.input()));
  Mat<S> h(t_len, hid), c(t_len, hid), gates(t_len, 4 * hid);
  Vec<S> h_prev = Vec<S>::Zero(hid), c_prev = Vec<S>::Zero(hid);
  for (int step = 0; step < t_len; ++step) {
    int row = reverse ? t_len - 1 - step : step;
    Vec<S> z = cell.w_in * x.row(row).transpose() + cell.w_rec * h_prev +
               cell.bias;
    Vec<S> gate(4 * hid);
    for (int k = 0; k < hid; ++k) {
      gate[k] = sigmoid(z[k]);                        // input
      gate[hid + k] = sigmoid(z[hid + k]);            // forget
      gate[2 * hid + k] = std::tanh(z[2 * hid + k]);  // cell candidate
      gate[3 * hid + k] = sigmoid(z[3 * hid + k]);    // output
    }
    Vec<S> c_t = gate.segment(hid, hid).cwiseProduct(c_prev) +
                 gate.segment(0, hid).cwiseProduct(gate.segment(2 * hid, hid));
    Vec<S> h_t =
        gate.segment(3 * hid, hid).cwiseProduct(c_t.array().tanh().matrix());
    gates.row(step) = gate.transpose();
    c.row(step) = c_t.transpose();
    h.row(step) = h_t.transpose();
    h_prev = h_t;
    c_prev = c_t;
  }
  if (trace != nullptr) {
    trace->x = x;
    trace->h = h;
    trace->c = c;
    trace->gates = gates;
    trace->reverse = reverse;
  }
  Mat<S> out(t_len, hid);
  for (int step = 0; step < t_len; ++step) {
    int row = reverse ? t_len - 1 - step : step;
    out.row(row) = h.row(step);
  }
  return out;
}

// Backpropagation through time. dh arrives in input order; the returned
// input gradient is in input order as well. Parameter gradients accumulate
// into grad.
template <typename S>
Mat<S> lstm_backward(const LstmCell<S>& cell, const LstmTrace<S>& trace,
                     const Mat<S>& dh_in, LstmCell<S>& grad) {
  const int t_len = static_cast<int>(trace.x.rows());
  const int hid = cell.hidden();
  Mat<S> dx = Mat<S>::Zero(t_len, cell.input());
  Vec<S> dh_rec = Vec<S>::Zero(hid), dc_rec = Vec<S>::Zero(hid);
  for (int step = t_len - 1; step >= 0; --step) {
    int row = trace.reverse ? t_len - 1 - step : step;
    Vec<S> dh = dh_in.row(row).transpose() + dh_rec;
    Vec<S> gate = trace.gates.row(step).transpose();
    auto gi = gate.segment(0, hid);
    auto gf = gate.segment(hid, hid);
    auto gg = gate.segment(2 * hid, hid);
    auto go = gate.segment(3 * hid, hid);
    Vec<S> c_t = trace.c.row(step).transpose();
    Vec<S> c_prev = step > 0 ? Vec<S>(trace.c.row(step - 1).transpose())
                             : Vec<S>(Vec<S>::Zero(hid));
    Vec<S> h_prev = step > 0 ? Vec<S>(trace.h.row(step - 1).transpose())
                             : Vec<S>(Vec<S>::Zero(hid));
    Vec<S> tc = c_t.array().tanh().matrix();

    Vec<S> dz(4 * hid);
    // output gate
    dz.segment(3 * hid, hid) =
        dh.cwiseProduct(tc).cwiseProduct(go).cwiseProduct(
            (Vec<S>::Ones(hid) - go));
    Vec<S> dc = dh.cwiseProduct(go).cwiseProduct(
                    (Vec<S>::Ones(hid) - tc.cwiseProduct(tc))) +
                dc_rec;
    // input, forget, candidate gates
    dz.segment(0, hid) = dc.cwiseProduct(gg).cwiseProduct(gi).cwiseProduct(
        (Vec<S>::Ones(hid) - gi));
    dz.segment(hid, hid) = dc.cwiseProduct(c_prev).cwiseProduct(gf).cwiseProduct(
        (Vec<S>::Ones(hid) - gf));
    dz.segment(2 * hid, hid) =
        dc.cwiseProduct(gi).cwiseProduct((Vec<S>::Ones(hid) - gg.cwiseProduct(gg)));

    dc_rec = dc.cwiseProduct(gf);
    grad.w_in += dz * trace.x.row(row);
    grad.w_rec += dz * h_prev.transpose();
    grad.bias += dz;
    dx.row(row) += (cell.w_in.transpose() * dz).transpose();
    dh_rec = cell.w_rec.transpose() * dz;
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Bidirectional wrapper: output row t = [forward_h(t) ; backward_h(t)].
// ---------------------------------------------------------------------------

template <typename S>
struct BiLstm {
  LstmCell<S> fwd;
  LstmCell<S> bwd;

  int out_dim() const { return fwd.hidden() + bwd.hidden(); }
  int input() const { return fwd.input(); }

  static BiLstm zeros(int input_dim, int hidden_per_dir) {
    return {LstmCell<S>::zeros(input_dim, hidden_per_dir),
            LstmCell<S>::zeros(input_dim, hidden_per_dir)};
  }

  void set_zero() {
    fwd.set_zero();
    bwd.set_zero();
  }
};

template <typename S>
struct BiLstmTrace {
  LstmTrace<S> fwd;
  LstmTrace<S> bwd;
};

template <typename S>
Mat<S> bilstm_forward(const BiLstm<S>& layer, const Mat<S>& x,
                      BiLstmTrace<S>* trace) {
  Mat<S> hf = lstm_forward(layer.fwd, x, false, trace ? &trace->fwd : nullptr);
  Mat<S> hb = lstm_forward(layer.bwd, x, true, trace ? &trace->bwd : nullptr);
  Mat<S> out(x.rows(), layer.out_dim());
  out.leftCols(layer.fwd.hidden()) = hf;
  out.rightCols(layer.bwd.hidden()) = hb;
  return out;
}

template <typename S>
Mat<S> bilstm_backward(const BiLstm<S>& layer, const BiLstmTrace<S>& trace,
                       const Mat<S>& dh, BiLstm<S>& grad) {
  Mat<S> dx = lstm_backward(layer.fwd, trace.fwd,
                            Mat<S>(dh.leftCols(layer.fwd.hidden())), grad.fwd);
  dx += lstm_backward(layer.bwd, trace.bwd,
                      Mat<S>(dh.rightCols(layer.bwd.hidden())), grad.bwd);
  return dx;
}

// ---------------------------------------------------------------------------
// Attention pooling over timesteps: weights from a learned scorer, output is
// the weighted sum of rows.
// ---------------------------------------------------------------------------

enum class AttentionKind { ProjTanh, Dot };

template <typename S>
struct Attention {
  AttentionKind kind = AttentionKind::ProjTanh;
  Mat<S> proj;     // A x D (ProjTanh only)
  Vec<S> context;  // A (ProjTanh) or D (Dot)

  static Attention zeros(AttentionKind kind, int in_dim, int att_dim) {
    Attention a;
    a.kind = kind;
    if (kind == AttentionKind::ProjTanh) {
      a.proj = Mat<S>::Zero(att_dim, in_dim);
      a.context = Vec<S>::Zero(att_dim);
    } else {
      a.proj = Mat<S>::Zero(0, 0);
      a.context = Vec<S>::Zero(in_dim);
    }
    return a;
  }

  void set_zero() {
    proj.setZero();
    context.setZero();
  }
};

template <typename S>
struct AttentionTrace {
  Mat<S> h;       // T x D
  Mat<S> tanh_a;  // T x A (ProjTanh)
  Vec<S> alphas;  // T
};

template <typename S>
Vec<S> softmax(const Vec<S>& e) {
  S m = e.maxCoeff();
  Vec<S> out = (e.array() - m).exp().matrix();
  return out / out.sum();
}

template <typename S>
Vec<S> attention_forward(const Attention<S>& att, const Mat<S>& h,
                         AttentionTrace<S>* trace) {
  const int t_len = static_cast<int>(h.rows());
  if (t_len == 0) throw Error("attention over an empty sequence");
  Vec<S> scores(t_len);
  Mat<S> tanh_a;
  if (att.kind == AttentionKind::ProjTanh) {
    tanh_a = (h * att.proj.transpose()).array().tanh().matrix();  // T x A
    scores = tanh_a * att.context;
  } else {
    scores = h * att.context;
  }
  Vec<S> alphas = softmax(scores);
  Vec<S> pooled = h.transpose() * alphas;
  if (trace != nullptr) {
    trace->h = h;
    trace->tanh_a = tanh_a;
    trace->alphas = alphas;
  }
  return pooled;
}

template <typename S>
Mat<S> attention_backward(const Attention<S>& att,
                          const AttentionTrace<S>& trace, const Vec<S>& dp,
                          Attention<S>& grad) {
  const int t_len = static_cast<int>(trace.h.rows());
  Mat<S> dh = trace.alphas * dp.transpose();  // T x D
  Vec<S> dalpha = trace.h * dp;               // T
  S dot = trace.alphas.dot(dalpha);
  Vec<S> de =
      trace.alphas.cwiseProduct(dalpha - Vec<S>::Constant(t_len, dot));
  if (att.kind == AttentionKind::ProjTanh) {
    for (int t = 0; t < t_len; ++t) {
      Vec<S> th = trace.tanh_a.row(t).transpose();
      Vec<S> da =
          (de[t] * att.context).cwiseProduct((Vec<S>::Ones(th.size()) -
                                              th.cwiseProduct(th)));
      grad.proj += da * trace.h.row(t);
      grad.context += de[t] * th;
      dh.row(t) += (att.proj.transpose() * da).transpose();
    }
  } else {
    for (int t = 0; t < t_len; ++t) {
      grad.context += de[t] * trace.h.row(t).transpose();
      dh.row(t) += de[t] * att.context.transpose();
    }
  }
  return dh;
}

// ---------------------------------------------------------------------------
// Initialization and optimization helpers.
// ---------------------------------------------------------------------------

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] drawn from rng.
template <typename S, typename T>
void init_uniform(T& tensor, int fan_in, std::mt19937_64& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in > 0 ? fan_in : 1));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < tensor.size(); ++i)
    tensor.data()[i] = static_cast<S>(dist(rng));
}

template <typename S>
void init_lstm(LstmCell<S>& cell, std::mt19937_64& rng) {
  init_uniform<S>(cell.w_in, cell.input(), rng);
  init_uniform<S>(cell.w_rec, cell.hidden(), rng);
  cell.bias.setZero();
  // Forget-gate bias +1 so early training does not flush cell state.
  cell.bias.segment(cell.hidden(), cell.hidden()).setConstant(S(1));
}

template <typename S>
void init_bilstm(BiLstm<S>& layer, std::mt19937_64& rng) {
  init_lstm(layer.fwd, rng);
  init_lstm(layer.bwd, rng);
}

// Adam over a flat parameter vector. Standard defaults; only the learning
// rate is configurable from the outside.
template <typename S>
struct Adam {
  double lr = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  Vec<S> m, v;

  explicit Adam(double learning_rate, Eigen::Index n)
      : lr(learning_rate), m(Vec<S>::Zero(n)), v(Vec<S>::Zero(n)) {}

  void update(Vec<S>& theta, const Vec<S>& grad) {
    ++step;
    m = S(beta1) * m + S(1 - beta1) * grad;
    v = S(beta2) * v + S(1 - beta2) * grad.cwiseProduct(grad);
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    Vec<S> m_hat = m / S(bc1);
    Vec<S> v_hat = v / S(bc2);
    theta -= S(lr) * m_hat.cwiseQuotient(
                         (v_hat.cwiseSqrt().array() + S(eps)).matrix());
  }
};

// Inverted dropout mask: entries are 0 with probability rate, else
// 1/(1 - rate). Drawn from rng in row-major order.
template <typename S>
Mat<S> dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate,
                    std::mt19937_64& rng) {
  if (rate < 0.0 || rate >= 1.0) throw Error("dropout rate must be in [0, 1)");
  Mat<S> mask(rows, cols);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  S keep_scale = S(1.0 / (1.0 - rate));
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      mask(r, c) = dist(rng) < rate ? S(0) : keep_scale;
    }
  }
  return mask;
}

}  // namespace nn
}  // namespace revmine
