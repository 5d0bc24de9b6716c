#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "archgeo/arch_space.hpp"
#include "archgeo/geometry.hpp"
#include "archgeo/landscape.hpp"
#include "archgeo/rng.hpp"

namespace archgeo {

// ---------------------------------------------------------------------------
// Architecture parameters
// ---------------------------------------------------------------------------

/// Continuous architecture logits: one length-`ops` vector per decision
/// slot, stored flat in row-major order.
struct AlphaParams {
  int slots = 0;
  int ops = 0;
  std::vector<double> logits;  // slots * ops

  AlphaParams() = default;
  AlphaParams(int s, int o, std::vector<double> values)
      : slots(s), ops(o), logits(std::move(values)) {
    if (slots < 1 || ops < 1)
      throw std::invalid_argument("AlphaParams: need slots, ops >= 1");
    if (logits.size() != static_cast<std::size_t>(slots) * ops)
      throw std::invalid_argument("AlphaParams: size mismatch");
    if (!all_finite())
      throw std::invalid_argument("AlphaParams: non-finite entry");
  }

  static AlphaParams zeros(int slots, int ops) {
    return AlphaParams(slots, ops,
                       std::vector<double>(
                           static_cast<std::size_t>(slots) * ops, 0.0));
  }

  static AlphaParams random_init(int slots, int ops, double stddev,
                                 SplitMix64& rng) {
    std::vector<double> values(static_cast<std::size_t>(slots) * ops);
    for (auto& v : values) v = stddev * rng.normal();
    return AlphaParams(slots, ops, std::move(values));
  }

  double at(int slot, int op) const {
    return logits[static_cast<std::size_t>(slot) * ops + op];
  }
  double& at(int slot, int op) {
    return logits[static_cast<std::size_t>(slot) * ops + op];
  }
  std::span<const double> row(int slot) const {
    return {logits.data() + static_cast<std::size_t>(slot) * ops,
            static_cast<std::size_t>(ops)};
  }

  bool all_finite() const {
    for (double v : logits)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool same_shape(const AlphaParams& other) const {
    return slots == other.slots && ops == other.ops;
  }

  friend bool operator==(const AlphaParams&, const AlphaParams&) = default;
};

/// a + c * g, elementwise over the flat logits.
inline AlphaParams add_scaled(const AlphaParams& a, double c,
                              const AlphaParams& g) {
  if (!a.same_shape(g))
    throw std::invalid_argument("add_scaled: shape mismatch");
  AlphaParams out = a;
  for (std::size_t i = 0; i < out.logits.size(); ++i)
    out.logits[i] += c * g.logits[i];
  return out;
}

/// Softmax of one logit vector; positive components summing to one.
inline std::vector<double> softmax_mix(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("softmax_mix: empty input");
  double max_logit = logits[0];
  for (double v : logits) {
    if (!std::isfinite(v))
      throw std::invalid_argument("softmax_mix: non-finite input");
    max_logit = std::max(max_logit, v);
  }
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max_logit);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

/// Per-slot argmax with ties broken toward the lowest op index.
inline Nb201Arch discretize(const AlphaParams& alpha) {
  std::vector<int> codes(alpha.slots);
  for (int s = 0; s < alpha.slots; ++s) {
    int best = 0;
    for (int o = 1; o < alpha.ops; ++o)
      if (alpha.at(s, o) > alpha.at(s, best)) best = o;
    codes[s] = best;
  }
  return Nb201Arch(std::move(codes), alpha.ops);
}

// ---------------------------------------------------------------------------
// Optimizer configuration and cost accounting
// ---------------------------------------------------------------------------

/// Hyperparameters of the flatness-biased architecture update. xi is the
/// inner weight learning rate of the second-order formulation and is fixed
/// to zero here: only the first-order variants are implemented.
struct A2MConfig {
  double rho_alpha = 0.0;
  double epsilon = 1e-2;
  double xi = 0.0;
  double eta_alpha = 0.05;
  double eta_w = 0.05;

  void validate() const {
    if (!(rho_alpha >= 0)) throw std::invalid_argument("A2MConfig: rho_alpha < 0");
    if (!(epsilon > 0)) throw std::invalid_argument("A2MConfig: epsilon <= 0");
    if (xi != 0.0)
      throw std::invalid_argument("A2MConfig: only xi = 0 is supported");
  }
};

/// Counts gradient evaluations per optimizer step (the per-step cost model:
/// one backward per requested gradient).
struct GradCounter {
  long long alpha_grad_evals = 0;
  long long w_grad_evals = 0;
  void reset() { alpha_grad_evals = w_grad_evals = 0; }
};

/// A differentiable loss over architecture logits. Implementations bump the
/// counter once per gradient evaluation.
class AlphaObjective {
 public:
  virtual ~AlphaObjective() = default;
  virtual double loss(const AlphaParams& alpha) const = 0;
  virtual AlphaParams gradient(const AlphaParams& alpha,
                               GradCounter& counter) const = 0;
};

// ---------------------------------------------------------------------------
// Relaxation testbed: expected accuracy under the product softmax
// ---------------------------------------------------------------------------

/// Exactly differentiable surrogate for the validation loss: the expected
/// tabulated accuracy of an architecture drawn from the per-slot softmax
/// distribution, negated and scaled to O(1),
///   loss(alpha) = -sum_a prod_s softmax(logits_s)[a_s] * acc(a)/100.
/// The sum runs over the full sequence space, so both the loss and its
/// closed-form gradient are exact.
class RelaxedLandscapeLoss final : public AlphaObjective {
 public:
  RelaxedLandscapeLoss(const AccuracyOracle& oracle, std::string dataset,
                       std::uint64_t space_cap = 1000000)
      : dataset_(std::move(dataset)) {
    const SpaceDesc desc = oracle.space();
    const auto* seq = std::get_if<Nb201Space>(&desc);
    if (!seq)
      throw std::invalid_argument(
          "RelaxedLandscapeLoss: requires a sequence space");
    const std::uint64_t total = count_space(desc);
    if (total > space_cap)
      throw std::invalid_argument("RelaxedLandscapeLoss: space size " +
                                  std::to_string(total) + " exceeds cap");
    slots_ = seq->length;
    ops_ = seq->num_ops;
    codes_.reserve(total * slots_);
    accs_.reserve(total);
    min_acc_ = 100.0;
    max_acc_ = 0.0;
    for (const auto& arch : enumerate_nb201(*seq)) {
      const double acc = oracle.query(Architecture{arch}, dataset_);
      for (int c : arch.codes) codes_.push_back(static_cast<std::int8_t>(c));
      accs_.push_back(acc / 100.0);
      min_acc_ = std::min(min_acc_, acc);
      max_acc_ = std::max(max_acc_, acc);
    }
  }

  int slots() const { return slots_; }
  int ops() const { return ops_; }
  double min_acc() const { return min_acc_; }
  double max_acc() const { return max_acc_; }
  const std::string& dataset() const { return dataset_; }

  double loss(const AlphaParams& alpha) const override {
    const auto probs = slot_probs(alpha);
    double expected = 0.0;
    const std::int8_t* code = codes_.data();
    for (double acc : accs_) {
      double w = 1.0;
      for (int s = 0; s < slots_; ++s)
        w *= probs[static_cast<std::size_t>(s) * ops_ + code[s]];
      expected += w * acc;
      code += slots_;
    }
    return -expected;
  }

  /// Closed-form gradient via the softmax Jacobian:
  /// d loss / d logit_{s,o} = -p_{s,o} (M_{s,o} - E) where M_{s,o} is the
  /// expected accuracy conditional on slot s choosing op o.
  AlphaParams gradient(const AlphaParams& alpha,
                       GradCounter& counter) const override {
    ++counter.alpha_grad_evals;
    check_shape(alpha);
    const auto probs = slot_probs(alpha);
    std::vector<double> conditional(probs.size(), 0.0);  // M_{s,o}
    std::vector<double> prefix(slots_ + 1), suffix(slots_ + 1);
    double expected = 0.0;
    const std::int8_t* code = codes_.data();
    for (double acc : accs_) {
      prefix[0] = 1.0;
      for (int s = 0; s < slots_; ++s)
        prefix[s + 1] =
            prefix[s] * probs[static_cast<std::size_t>(s) * ops_ + code[s]];
      suffix[slots_] = 1.0;
      for (int s = slots_ - 1; s >= 0; --s)
        suffix[s] =
            suffix[s + 1] * probs[static_cast<std::size_t>(s) * ops_ + code[s]];
      expected += prefix[slots_] * acc;
      for (int s = 0; s < slots_; ++s)
        conditional[static_cast<std::size_t>(s) * ops_ + code[s]] +=
            prefix[s] * suffix[s + 1] * acc;
      code += slots_;
    }
    AlphaParams grad = AlphaParams::zeros(slots_, ops_);
    for (std::size_t i = 0; i < probs.size(); ++i)
      grad.logits[i] = -probs[i] * (conditional[i] - expected);
    return grad;
  }

 private:
  void check_shape(const AlphaParams& alpha) const {
    if (alpha.slots != slots_ || alpha.ops != ops_)
      throw std::invalid_argument("RelaxedLandscapeLoss: alpha shape mismatch");
  }

  std::vector<double> slot_probs(const AlphaParams& alpha) const {
    check_shape(alpha);
    std::vector<double> probs(alpha.logits.size());
    for (int s = 0; s < slots_; ++s) {
      const auto p = softmax_mix(alpha.row(s));
      std::copy(p.begin(), p.end(),
                probs.begin() + static_cast<std::size_t>(s) * ops_);
    }
    return probs;
  }

  std::string dataset_;
  int slots_ = 0;
  int ops_ = 0;
  double min_acc_ = 0.0;
  double max_acc_ = 0.0;
  std::vector<std::int8_t> codes_;
  std::vector<double> accs_;
};

// ---------------------------------------------------------------------------
// Toy supernet testbed
// ---------------------------------------------------------------------------

/// Four-node mixed-operation cell over {zero, skip, linear_a, linear_b,
/// half} with per-edge 8x8 weight matrices on the two linear ops and a
/// linear readout, trained on a seeded teacher-generated regression set.
/// Small enough that hand-rolled reverse mode is exact and cheap.
class ToySupernet {
 public:
  static constexpr int kNodes = 4;
  static constexpr int kEdges = 6;  // (0,1),(0,2),(1,2),(0,3),(1,3),(2,3)
  static constexpr int kOps = 5;    // zero, skip, linear_a, linear_b, half
  static constexpr int kDim = 8;
  static constexpr int kSamplesPerSplit = 256;

  static const OperationSet& op_set() {
    static const OperationSet ops({"zero", "skip", "linear_a", "linear_b",
                                   "half"},
                                  0);
    return ops;
  }

  enum class Split { train, val };

  AlphaParams alpha;
  std::vector<double> weights;  // per edge: W_a, W_b (8x8 each); then readout

  static constexpr int kEdgeStride = 2 * kDim * kDim;
  static constexpr int kReadoutOffset = kEdges * kEdgeStride;
  static constexpr int kNumWeights = kReadoutOffset + kDim;

  /// Teacher architecture used to generate the regression targets.
  static const Nb201Arch& teacher_arch() {
    static const Nb201Arch arch({2, 1, 3, 0, 4, 2}, kOps);
    return arch;
  }

  static ToySupernet make(std::uint64_t seed) {
    ToySupernet net;
    SplitMix64 master(seed);
    SplitMix64 data_rng = master.split("data");
    SplitMix64 teacher_rng = master.split("teacher");
    SplitMix64 init_rng = master.split("init");

    // teacher weights, used only to generate targets
    std::vector<double> teacher_w(kNumWeights);
    for (auto& v : teacher_w) v = 0.35 * teacher_rng.normal();
    AlphaParams teacher_alpha = AlphaParams::zeros(kEdges, kOps);
    for (int e = 0; e < kEdges; ++e) {
      for (int o = 0; o < kOps; ++o) teacher_alpha.at(e, o) = -200.0;
      teacher_alpha.at(e, teacher_arch().codes[e]) = 200.0;
    }

    const int total = 2 * kSamplesPerSplit;
    net.inputs_.resize(static_cast<std::size_t>(total) * kDim);
    net.targets_.resize(total);
    for (double& v : net.inputs_) v = data_rng.normal();
    for (int i = 0; i < total; ++i)
      net.targets_[i] = forward_one(
          teacher_alpha, teacher_w,
          std::span<const double>(net.inputs_.data() +
                                      static_cast<std::size_t>(i) * kDim,
                                  kDim));

    net.weights.resize(kNumWeights);
    for (auto& v : net.weights) v = 0.3 * init_rng.normal();
    net.alpha = AlphaParams::random_init(kEdges, kOps, 0.5, init_rng);
    return net;
  }

  /// Builds a supernet over an explicit dataset (|inputs| = 2*256*8 doubles,
  /// |targets| = 512; first half train, second half validation).
  static ToySupernet with_data(std::vector<double> inputs,
                               std::vector<double> targets, AlphaParams alpha,
                               std::vector<double> weights) {
    const std::size_t total = 2 * kSamplesPerSplit;
    if (inputs.size() != total * kDim || targets.size() != total)
      throw std::invalid_argument("ToySupernet::with_data: size mismatch");
    ToySupernet net;
    net.inputs_ = std::move(inputs);
    net.targets_ = std::move(targets);
    net.alpha = std::move(alpha);
    net.weights = std::move(weights);
    net.check(net.alpha, net.weights);
    return net;
  }

  double loss(Split split) const { return loss_eval(split, alpha, weights); }

  double loss_at(Split split, const AlphaParams& at_alpha) const {
    return loss_eval(split, at_alpha, weights);
  }

  double loss_eval(Split split, const AlphaParams& at_alpha,
                   std::span<const double> w) const {
    check(at_alpha, w);
    const auto [begin, count] = range(split);
    double sum = 0.0;
    for (int i = 0; i < count; ++i) {
      const double y_hat = forward_one(at_alpha, w, sample(begin + i));
      const double err = y_hat - targets_[begin + i];
      sum += err * err;
    }
    return sum / count;
  }

  struct Eval {
    double loss = 0.0;
    AlphaParams alpha_grad;
    std::vector<double> w_grad;
  };

  /// Loss plus both gradients; bumps both counters once.
  Eval grads(Split split, GradCounter& counter) const {
    ++counter.alpha_grad_evals;
    ++counter.w_grad_evals;
    return backward(split, alpha, weights, true, true);
  }

  /// Gradient w.r.t. the logits at an arbitrary alpha, weights fixed.
  AlphaParams alpha_grad(Split split, const AlphaParams& at_alpha,
                         GradCounter& counter) const {
    ++counter.alpha_grad_evals;
    return backward(split, at_alpha, weights, true, false).alpha_grad;
  }

  /// Gradient w.r.t. the weights at the current (alpha, weights).
  std::vector<double> weight_grad(Split split, GradCounter& counter) const {
    ++counter.w_grad_evals;
    return backward(split, alpha, weights, false, true).w_grad;
  }

  Eval backward(Split split, const AlphaParams& at_alpha,
                std::span<const double> w, bool want_alpha,
                bool want_w) const {
    check(at_alpha, w);
    Eval out;
    out.alpha_grad = AlphaParams::zeros(kEdges, kOps);
    out.w_grad.assign(kNumWeights, 0.0);

    std::array<std::vector<double>, kEdges> probs;
    for (int e = 0; e < kEdges; ++e) probs[e] = softmax_mix(at_alpha.row(e));

    const auto [begin, count] = range(split);
    const double* readout = w.data() + kReadoutOffset;
    std::array<std::array<double, kDim>, kNodes> node;
    std::array<std::array<double, kDim>, kNodes> node_grad;
    for (int i = 0; i < count; ++i) {
      const auto x = sample(begin + i);
      std::copy(x.begin(), x.end(), node[0].begin());
      for (int n = 1; n < kNodes; ++n) {
        node[n].fill(0.0);
        for (int e = 0; e < kEdges; ++e)
          if (edge_dst(e) == n)
            mixed_op(probs[e], w.data() + e * kEdgeStride, node[edge_src(e)],
                     node[n]);
      }
      double y_hat = 0.0;
      for (int k = 0; k < kDim; ++k) y_hat += readout[k] * node[kNodes - 1][k];
      const double err = y_hat - targets_[begin + i];
      out.loss += err * err;

      const double dy = 2.0 * err / count;
      for (auto& g : node_grad) g.fill(0.0);
      for (int k = 0; k < kDim; ++k) {
        node_grad[kNodes - 1][k] = dy * readout[k];
        if (want_w)
          out.w_grad[kReadoutOffset + k] += dy * node[kNodes - 1][k];
      }
      // visit edges by decreasing destination so node grads are final
      for (int e = kEdges - 1; e >= 0; --e)
        backprop_edge(e, probs[e], w, node, node_grad, want_alpha, want_w,
                      out);
    }
    out.loss /= count;

    if (want_alpha) {
      // chain through the per-edge softmax: d l_{e,o} = p_o (dp_o - sum p dp)
      for (int e = 0; e < kEdges; ++e) {
        double inner = 0.0;
        for (int o = 0; o < kOps; ++o)
          inner += probs[e][o] * out.alpha_grad.at(e, o);
        for (int o = 0; o < kOps; ++o)
          out.alpha_grad.at(e, o) =
              probs[e][o] * (out.alpha_grad.at(e, o) - inner);
      }
    } else {
      out.alpha_grad = AlphaParams::zeros(kEdges, kOps);
    }
    return out;
  }

  static int edge_src(int e) {
    static constexpr std::array<int, kEdges> src{0, 0, 1, 0, 1, 2};
    return src[e];
  }
  static int edge_dst(int e) {
    static constexpr std::array<int, kEdges> dst{1, 2, 2, 3, 3, 3};
    return dst[e];
  }

 private:
  std::pair<int, int> range(Split split) const {
    return split == Split::train ? std::pair{0, kSamplesPerSplit}
                                 : std::pair{kSamplesPerSplit,
                                             kSamplesPerSplit};
  }

  std::span<const double> sample(int i) const {
    return {inputs_.data() + static_cast<std::size_t>(i) * kDim, kDim};
  }

  void check(const AlphaParams& at_alpha, std::span<const double> w) const {
    if (at_alpha.slots != kEdges || at_alpha.ops != kOps)
      throw std::invalid_argument("ToySupernet: alpha shape mismatch");
    if (w.size() != static_cast<std::size_t>(kNumWeights))
      throw std::invalid_argument("ToySupernet: weight size mismatch");
    if (inputs_.empty())
      throw std::invalid_argument("ToySupernet: empty dataset");
  }

  /// out += sum_o p_o op_o(v) for one edge.
  static void mixed_op(const std::vector<double>& p, const double* ew,
                       const std::array<double, kDim>& v,
                       std::array<double, kDim>& out) {
    const double* wa = ew;
    const double* wb = ew + kDim * kDim;
    const double pass = p[1] + 0.5 * p[4];  // skip + half
    for (int r = 0; r < kDim; ++r) {
      double acc = pass * v[r];
      double dot_a = 0.0, dot_b = 0.0;
      for (int c = 0; c < kDim; ++c) {
        dot_a += wa[r * kDim + c] * v[c];
        dot_b += wb[r * kDim + c] * v[c];
      }
      out[r] += acc + p[2] * dot_a + p[3] * dot_b;
    }
  }

  void backprop_edge(int e, const std::vector<double>& p,
                     std::span<const double> w,
                     const std::array<std::array<double, kDim>, kNodes>& node,
                     std::array<std::array<double, kDim>, kNodes>& node_grad,
                     bool want_alpha, bool want_w, Eval& out) const {
    const auto& v = node[edge_src(e)];
    const auto& g = node_grad[edge_dst(e)];
    auto& gs = node_grad[edge_src(e)];
    const double* wa = w.data() + e * kEdgeStride;
    const double* wb = wa + kDim * kDim;
    double* dwa = out.w_grad.data() + e * kEdgeStride;
    double* dwb = dwa + kDim * kDim;

    double dp_skip = 0.0, dp_a = 0.0, dp_b = 0.0, dp_half = 0.0;
    for (int r = 0; r < kDim; ++r) {
      const double gr = g[r];
      if (gr == 0.0 && !want_alpha) continue;
      double dot_a = 0.0, dot_b = 0.0;
      for (int c = 0; c < kDim; ++c) {
        dot_a += wa[r * kDim + c] * v[c];
        dot_b += wb[r * kDim + c] * v[c];
      }
      dp_skip += gr * v[r];
      dp_a += gr * dot_a;
      dp_b += gr * dot_b;
      dp_half += gr * 0.5 * v[r];
      if (want_w) {
        for (int c = 0; c < kDim; ++c) {
          dwa[r * kDim + c] += p[2] * gr * v[c];
          dwb[r * kDim + c] += p[3] * gr * v[c];
        }
      }
      // downstream gradient: skip + half pass-through plus both linears
      const double pass = p[1] + 0.5 * p[4];
      for (int c = 0; c < kDim; ++c)
        gs[c] += gr * (p[2] * wa[r * kDim + c] + p[3] * wb[r * kDim + c]);
      gs[r] += pass * gr;
    }
    if (want_alpha) {
      // accumulate dE/dp per op; the softmax chain runs once per batch
      out.alpha_grad.at(e, 1) += dp_skip;
      out.alpha_grad.at(e, 2) += dp_a;
      out.alpha_grad.at(e, 3) += dp_b;
      out.alpha_grad.at(e, 4) += dp_half;
    }
  }

  static double forward_one(const AlphaParams& at_alpha,
                            std::span<const double> w,
                            std::span<const double> x) {
    std::array<std::vector<double>, kEdges> probs;
    for (int e = 0; e < kEdges; ++e) probs[e] = softmax_mix(at_alpha.row(e));
    std::array<std::array<double, kDim>, kNodes> node;
    std::copy(x.begin(), x.end(), node[0].begin());
    for (int n = 1; n < kNodes; ++n) {
      node[n].fill(0.0);
      for (int e = 0; e < kEdges; ++e)
        if (edge_dst(e) == n)
          mixed_op(probs[e], w.data() + e * kEdgeStride, node[edge_src(e)],
                   node[n]);
    }
    double y = 0.0;
    for (int k = 0; k < kDim; ++k) y += w[kReadoutOffset + k] * node[kNodes - 1][k];
    return y;
  }

  std::vector<double> inputs_;
  std::vector<double> targets_;
};

/// Validation loss of a supernet as a differentiable function of alpha, with
/// the weights held fixed.
class SupernetValObjective final : public AlphaObjective {
 public:
  explicit SupernetValObjective(const ToySupernet& net) : net_(&net) {}
  double loss(const AlphaParams& alpha) const override {
    return net_->loss_at(ToySupernet::Split::val, alpha);
  }
  AlphaParams gradient(const AlphaParams& alpha,
                       GradCounter& counter) const override {
    return net_->alpha_grad(ToySupernet::Split::val, alpha, counter);
  }

 private:
  const ToySupernet* net_;
};

// ---------------------------------------------------------------------------
// Update rules
// ---------------------------------------------------------------------------

/// Unnormalized sharpness-seeking point: alpha + rho * grad.
inline AlphaParams usam_point(const AlphaParams& alpha,
                              const AlphaParams& grad, double rho) {
  return add_scaled(alpha, rho, grad);
}

/// Flatness-biased architecture gradient:
///   g0 = grad L(alpha)            (builds the shift only)
///   alpha_tilde = alpha + rho * g0
///   g1 = grad L(alpha_tilde)
///   alpha_pm = alpha +- epsilon * g1
///   result = g1 + rho * (grad L(alpha_plus) - grad L(alpha_minus)) / (2 eps)
/// Exactly four gradient evaluations; the curvature correction is centered
/// at alpha, not at the shifted point.
inline AlphaParams a2m_grad(const AlphaObjective& objective,
                            const AlphaParams& alpha, const A2MConfig& cfg,
                            GradCounter& counter) {
  cfg.validate();
  auto ensure_finite = [](const AlphaParams& v, const char* stage) {
    if (!v.all_finite())
      throw std::runtime_error(std::string("a2m_grad: non-finite ") + stage);
  };
  const AlphaParams g0 = objective.gradient(alpha, counter);
  ensure_finite(g0, "g0");
  const AlphaParams alpha_tilde = usam_point(alpha, g0, cfg.rho_alpha);
  ensure_finite(alpha_tilde, "alpha_tilde");
  const AlphaParams g1 = objective.gradient(alpha_tilde, counter);
  ensure_finite(g1, "g1");
  const AlphaParams alpha_plus = add_scaled(alpha, cfg.epsilon, g1);
  const AlphaParams alpha_minus = add_scaled(alpha, -cfg.epsilon, g1);
  const AlphaParams grad_plus = objective.gradient(alpha_plus, counter);
  ensure_finite(grad_plus, "grad_plus");
  const AlphaParams grad_minus = objective.gradient(alpha_minus, counter);
  ensure_finite(grad_minus, "grad_minus");

  AlphaParams result = g1;
  const double scale = cfg.rho_alpha / (2.0 * cfg.epsilon);
  for (std::size_t i = 0; i < result.logits.size(); ++i)
    result.logits[i] +=
        scale * (grad_plus.logits[i] - grad_minus.logits[i]);
  ensure_finite(result, "result");
  return result;
}

// ---------------------------------------------------------------------------
// Alternating search loops
// ---------------------------------------------------------------------------

enum class Algo { darts_first_order, a2m };
enum class Testbed { relaxation, supernet };

inline std::string_view to_string(Algo a) {
  return a == Algo::darts_first_order ? "darts" : "a2m";
}
inline std::string_view to_string(Testbed t) {
  return t == Testbed::relaxation ? "relaxation" : "supernet";
}

struct RelaxationState {
  AlphaParams alpha;
  GradCounter counter;
};

struct SupernetState {
  ToySupernet net;
  GradCounter counter;
};

/// One first-order step on the relaxation testbed: a plain gradient descent
/// update of alpha against the objective (no inner weights).
inline void darts_first_order_step(RelaxationState& state,
                                   const AlphaObjective& objective,
                                   const A2MConfig& cfg) {
  cfg.validate();
  const AlphaParams g = objective.gradient(state.alpha, state.counter);
  state.alpha = add_scaled(state.alpha, -cfg.eta_alpha, g);
}

/// Same update with the gradient replaced by the flatness-biased one.
inline void a2m_step(RelaxationState& state, const AlphaObjective& objective,
                     const A2MConfig& cfg) {
  const AlphaParams g = a2m_grad(objective, state.alpha, cfg, state.counter);
  state.alpha = add_scaled(state.alpha, -cfg.eta_alpha, g);
}

/// Alternating first-order step on the supernet: one weight descent step on
/// the training loss, then one alpha descent step on the validation loss.
inline void darts_first_order_step(SupernetState& state, const A2MConfig& cfg) {
  cfg.validate();
  const auto w_grad =
      state.net.weight_grad(ToySupernet::Split::train, state.counter);
  for (std::size_t i = 0; i < state.net.weights.size(); ++i)
    state.net.weights[i] -= cfg.eta_w * w_grad[i];
  const AlphaParams g = state.net.alpha_grad(ToySupernet::Split::val,
                                             state.net.alpha, state.counter);
  state.net.alpha = add_scaled(state.net.alpha, -cfg.eta_alpha, g);
}

inline void a2m_step(SupernetState& state, const A2MConfig& cfg) {
  cfg.validate();
  const auto w_grad =
      state.net.weight_grad(ToySupernet::Split::train, state.counter);
  for (std::size_t i = 0; i < state.net.weights.size(); ++i)
    state.net.weights[i] -= cfg.eta_w * w_grad[i];
  const SupernetValObjective objective(state.net);
  const AlphaParams g =
      a2m_grad(objective, state.net.alpha, cfg, state.counter);
  state.net.alpha = add_scaled(state.net.alpha, -cfg.eta_alpha, g);
}

// ---------------------------------------------------------------------------
// Whole-run driver
// ---------------------------------------------------------------------------

struct TrajectoryPoint {
  int step = 0;
  double loss = 0.0;
  long long alpha_grad_evals = 0;  // cumulative
};

struct RunResult {
  Testbed testbed = Testbed::relaxation;
  Algo algo = Algo::darts_first_order;
  A2MConfig cfg;
  std::uint64_t seed = 0;
  std::vector<TrajectoryPoint> trajectory;  // entry 0 is the initial loss
  AlphaParams final_alpha;
  Architecture final_arch;
  std::optional<double> final_acc;      // relaxation only
  std::optional<double> final_barrier;  // relaxation only
  GradCounter totals;
};

/// Barrier from `arch` to the radius-3 neighbor whose accuracy is closest
/// to its own (ties broken toward the smaller architecture).
inline double barrier_to_nearest_neighbor(const AccuracyOracle& oracle,
                                          const Architecture& arch,
                                          std::string_view dataset,
                                          int radius = 3) {
  const int r = std::min(radius, max_distance(space_of(arch)));
  const double own = oracle.query(arch, dataset);
  const Architecture* best = nullptr;
  double best_gap = 0.0;
  const auto candidates = neighbors_at_radius(arch, r);
  for (const auto& cand : candidates) {
    const double gap = std::abs(oracle.query(cand, dataset) - own);
    if (!best || gap < best_gap || (gap == best_gap && arch_less(cand, *best))) {
      best = &cand;
      best_gap = gap;
    }
  }
  return accuracy_path(oracle, arch, *best, dataset).barrier;
}

inline RunResult run_search_relaxation(const AccuracyOracle& oracle,
                                       std::string_view dataset, Algo algo,
                                       A2MConfig cfg, int steps,
                                       std::uint64_t seed,
                                       double init_stddev = 1.0) {
  if (steps < 1)
    throw std::invalid_argument("run_search: steps must be >= 1");
  cfg.validate();
  const RelaxedLandscapeLoss objective(oracle, std::string(dataset));
  SplitMix64 init_rng(derive_seed(seed, "alpha-init"));
  RelaxationState state{AlphaParams::random_init(objective.slots(),
                                                 objective.ops(), init_stddev,
                                                 init_rng),
                        {}};
  RunResult result;
  result.testbed = Testbed::relaxation;
  result.algo = algo;
  result.cfg = cfg;
  result.seed = seed;
  result.trajectory.push_back({0, objective.loss(state.alpha), 0});
  for (int t = 1; t <= steps; ++t) {
    if (algo == Algo::a2m)
      a2m_step(state, objective, cfg);
    else
      darts_first_order_step(state, objective, cfg);
    result.trajectory.push_back(
        {t, objective.loss(state.alpha), state.counter.alpha_grad_evals});
  }
  result.final_alpha = state.alpha;
  result.final_arch = Architecture{discretize(state.alpha)};
  result.final_acc = oracle.query(result.final_arch, dataset);
  result.final_barrier =
      barrier_to_nearest_neighbor(oracle, result.final_arch, dataset);
  result.totals = state.counter;
  return result;
}

inline RunResult run_search_supernet(Algo algo, A2MConfig cfg, int steps,
                                     std::uint64_t seed) {
  if (steps < 1)
    throw std::invalid_argument("run_search: steps must be >= 1");
  cfg.validate();
  SupernetState state{ToySupernet::make(seed), {}};
  RunResult result;
  result.testbed = Testbed::supernet;
  result.algo = algo;
  result.cfg = cfg;
  result.seed = seed;
  result.trajectory.push_back(
      {0, state.net.loss(ToySupernet::Split::val), 0});
  for (int t = 1; t <= steps; ++t) {
    if (algo == Algo::a2m)
      a2m_step(state, cfg);
    else
      darts_first_order_step(state, cfg);
    result.trajectory.push_back({t, state.net.loss(ToySupernet::Split::val),
                                 state.counter.alpha_grad_evals});
  }
  result.final_alpha = state.net.alpha;
  result.final_arch = Architecture{discretize(state.net.alpha)};
  result.totals = state.counter;
  return result;
}

}  // namespace archgeo
