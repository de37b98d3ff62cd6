#pragma once

// A small multilayer perceptron g(x) in (0,1), trained by mini-batch
// gradient descent on mean squared error against k-sample targets.
//
// Weights of every layer are stored input-major ([in][out]), so a layer is a
// sum of axpy's over its inputs and zero inputs (one-hot encodings) are
// skipped in both directions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iseval/cards.hpp"
#include "iseval/error.hpp"
#include "iseval/golden.hpp"
#include "iseval/infoset.hpp"
#include "iseval/rng.hpp"

#include <json.hpp>

namespace iseval {

struct FeatureVector {
  std::vector<double> values;
  std::string encoding;
};

/// Encoded features for every observable of a provider, one row each.
class FeatureTable {
 public:
  FeatureTable(std::string encoding, std::size_t width, std::vector<ObservableId> ids, std::vector<double> rows)
      : encoding_(std::move(encoding)), width_(width), ids_(std::move(ids)), rows_(std::move(rows)) {
    if (rows_.size() != ids_.size() * width_) throw InvalidInput("feature table rows do not match ids x width");
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (!index_.emplace(ids_[i].value, static_cast<std::uint32_t>(i)).second)
        throw InvalidInput("duplicate observable in feature table");
    }
  }

  const std::string& encoding() const noexcept { return encoding_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<ObservableId>& ids() const noexcept { return ids_; }

  std::span<const double> row(std::size_t i) const { return {rows_.data() + i * width_, width_}; }

  std::uint32_t index_of(ObservableId x) const {
    const auto it = index_.find(x.value);
    if (it == index_.end()) throw InvalidInput("observable " + std::to_string(x.value) + " has no features");
    return it->second;
  }

  FeatureVector features(ObservableId x) const {
    const auto r = row(index_of(x));
    return {{r.begin(), r.end()}, encoding_};
  }

 private:
  std::string encoding_;
  std::size_t width_;
  std::vector<ObservableId> ids_;
  std::vector<double> rows_;
  std::map<std::uint32_t, std::uint32_t> index_;
};

inline FeatureTable one_hot_features(const std::vector<ObservableId>& ids) {
  std::vector<double> rows(ids.size() * ids.size(), 0.0);
  for (std::size_t i = 0; i < ids.size(); ++i) rows[i * ids.size() + i] = 1.0;
  return FeatureTable("onehot", ids.size(), ids, std::move(rows));
}

/// 13 high-rank one-hot, 13 low-rank one-hot, suited flag.
inline FeatureTable compact_poker_features(const Deck& deck) {
  constexpr std::size_t kWidth = 2 * kNumRanks + 1;
  std::vector<ObservableId> ids;
  std::vector<double> rows;
  for (int i = 0; i < canonical_hand_count(deck); ++i) {
    const auto h = hand_from_index(i, deck);
    ids.push_back({static_cast<std::uint32_t>(i)});
    std::vector<double> r(kWidth, 0.0);
    r[h.high_rank] = 1.0;
    r[kNumRanks + h.low_rank] = 1.0;
    r[2 * kNumRanks] = h.suited ? 1.0 : 0.0;
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return FeatureTable("compact", kWidth, std::move(ids), std::move(rows));
}

/// Feature table by encoding name ("onehot" or "compact") for a provider.
template <InformationSetProvider P>
FeatureTable make_features(const P& provider, const std::string& encoding) {
  if (encoding == "onehot") return one_hot_features(provider.observables());
  if constexpr (requires { provider.deck(); }) {
    if (encoding == "compact") return compact_poker_features(provider.deck());
  }
  throw InvalidInput("unknown feature encoding '" + encoding + "' for provider " + provider.id());
}

class Mlp {
 public:
  Mlp() = default;

  /// All parameters zero. sizes = {inputs, hidden..., 1}.
  static Mlp zeros(std::vector<std::size_t> sizes) {
    if (sizes.size() < 2) throw InvalidInput("network needs at least an input and an output layer");
    if (sizes.back() != 1) throw InvalidInput("network output layer must have size 1");
    for (auto s : sizes)
      if (s == 0) throw InvalidInput("layer sizes must be positive");
    Mlp m;
    m.sizes_ = std::move(sizes);
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < m.sizes_.size(); ++l) {
      m.weight_offset_.push_back(offset);
      offset += m.sizes_[l] * m.sizes_[l + 1];
      m.bias_offset_.push_back(offset);
      offset += m.sizes_[l + 1];
    }
    m.params_.assign(offset, 0.0);
    return m;
  }

  /// Glorot-uniform weights, zero biases.
  static Mlp random(std::vector<std::size_t> sizes, std::uint64_t seed) {
    Mlp m = zeros(std::move(sizes));
    CounterRng rng(seed, stream_id({0x696E6974ull}));
    for (std::size_t l = 0; l < m.layers(); ++l) {
      const double limit = std::sqrt(6.0 / static_cast<double>(m.sizes_[l] + m.sizes_[l + 1]));
      for (double& w : m.weights(l)) w = (2.0 * rng.uniform() - 1.0) * limit;
    }
    return m;
  }

  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
  std::size_t layers() const noexcept { return sizes_.empty() ? 0 : sizes_.size() - 1; }
  std::size_t inputs() const noexcept { return sizes_.front(); }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }

  std::span<double> weights(std::size_t l) noexcept {
    return {params_.data() + weight_offset_[l], sizes_[l] * sizes_[l + 1]};
  }
  std::span<const double> weights(std::size_t l) const noexcept {
    return {params_.data() + weight_offset_[l], sizes_[l] * sizes_[l + 1]};
  }
  std::span<double> bias(std::size_t l) noexcept { return {params_.data() + bias_offset_[l], sizes_[l + 1]}; }
  std::span<const double> bias(std::size_t l) const noexcept {
    return {params_.data() + bias_offset_[l], sizes_[l + 1]};
  }

  bool all_finite() const noexcept {
    return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
  }

  void check_input(std::span<const double> x) const {
    if (x.size() != inputs())
      throw InvalidInput("feature length mismatch: network expects " + std::to_string(inputs()) + ", got " +
                         std::to_string(x.size()));
  }

  double forward(std::span<const double> x) const;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> weight_offset_;
  std::vector<std::size_t> bias_offset_;
  std::vector<double> params_;
};

namespace detail {

inline double sigmoid(double z) noexcept { return 1.0 / (1.0 + std::exp(-z)); }

/// Per-layer activation buffers reused across samples.
class Workspace {
 public:
  explicit Workspace(const Mlp& m) {
    for (std::size_t l = 1; l < m.sizes().size(); ++l) acts_.emplace_back(m.sizes()[l], 0.0);
    std::size_t widest = 0;
    for (auto s : m.sizes()) widest = std::max(widest, s);
    delta_.assign(widest, 0.0);
    delta_prev_.assign(widest, 0.0);
  }

  /// Output probability; keeps hidden activations for backward().
  double forward(const Mlp& m, std::span<const double> x) {
    std::span<const double> in = x;
    const std::size_t L = m.layers();
    for (std::size_t l = 0; l < L; ++l) {
      auto& z = acts_[l];
      const auto b = m.bias(l);
      std::copy(b.begin(), b.end(), z.begin());
      const auto w = m.weights(l);
      const std::size_t out = z.size();
      for (std::size_t i = 0; i < in.size(); ++i) {
        const double xi = in[i];
        if (xi == 0.0) continue;
        const double* wi = w.data() + i * out;
        for (std::size_t j = 0; j < out; ++j) z[j] += xi * wi[j];
      }
      if (l + 1 < L)
        for (double& v : z) v = std::tanh(v);
      in = z;
    }
    return sigmoid(acts_[L - 1][0]);
  }

  /// Adds d(loss)/d(params) * scale for one sample to grad, where the sample
  /// loss is (p - target)^2 and p came from the last forward().
  void backward(const Mlp& m, std::span<const double> x, double p, double target, double scale,
                std::span<double> grad) {
    const std::size_t L = m.layers();
    std::size_t out = 1;
    delta_[0] = scale * 2.0 * (p - target) * p * (1.0 - p);
    for (std::size_t l = L; l-- > 0;) {
      const std::span<const double> in = l == 0 ? x : std::span<const double>(acts_[l - 1]);
      const auto w = m.weights(l);
      const std::size_t w_off = static_cast<std::size_t>(w.data() - m.params().data());
      const std::size_t b_off = static_cast<std::size_t>(m.bias(l).data() - m.params().data());
      for (std::size_t j = 0; j < out; ++j) grad[b_off + j] += delta_[j];
      for (std::size_t i = 0; i < in.size(); ++i) {
        const double xi = in[i];
        if (xi == 0.0 && l == 0) continue;
        double* gi = grad.data() + w_off + i * out;
        for (std::size_t j = 0; j < out; ++j) gi[j] += xi * delta_[j];
        if (l > 0) {
          const double* wi = w.data() + i * out;
          double s = 0;
          for (std::size_t j = 0; j < out; ++j) s += wi[j] * delta_[j];
          delta_prev_[i] = s * (1.0 - xi * xi);
        }
      }
      if (l > 0) {
        std::swap(delta_, delta_prev_);
        out = in.size();
      }
    }
  }

 private:
  std::vector<std::vector<double>> acts_;
  std::vector<double> delta_;
  std::vector<double> delta_prev_;
};

}  // namespace detail

inline double Mlp::forward(std::span<const double> x) const {
  check_input(x);
  detail::Workspace ws(*this);
  return ws.forward(*this, x);
}

inline double forward(const Mlp& m, const FeatureVector& x) { return m.forward(x.values); }

struct Sample {
  std::span<const double> features;
  double target = 0;
};

/// Mean of (g(x) - target)^2 over a nonempty batch.
inline double loss(const Mlp& m, std::span<const Sample> batch) {
  if (batch.empty()) throw InvalidInput("loss of an empty batch");
  detail::Workspace ws(m);
  double s = 0;
  for (const auto& smp : batch) {
    m.check_input(smp.features);
    const double d = ws.forward(m, smp.features) - smp.target;
    s += d * d;
  }
  return s / static_cast<double>(batch.size());
}

/// Batch loss; writes its gradient with respect to every parameter to grad.
inline double loss_and_gradient(const Mlp& m, std::span<const Sample> batch, std::span<double> grad,
                                detail::Workspace& ws) {
  if (batch.empty()) throw InvalidInput("loss of an empty batch");
  if (grad.size() != m.parameter_count()) throw InvalidInput("gradient buffer has the wrong size");
  std::fill(grad.begin(), grad.end(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double s = 0;
  for (const auto& smp : batch) {
    m.check_input(smp.features);
    const double p = ws.forward(m, smp.features);
    s += (p - smp.target) * (p - smp.target);
    ws.backward(m, smp.features, p, smp.target, scale, grad);
  }
  return s * scale;
}

inline double loss_and_gradient(const Mlp& m, std::span<const Sample> batch, std::span<double> grad) {
  detail::Workspace ws(m);
  return loss_and_gradient(m, batch, grad, ws);
}

struct AnalyticGradient {
  void operator()(const Mlp& m, std::span<const Sample> batch, std::span<double> grad) const {
    loss_and_gradient(m, batch, grad);
  }
};

struct GradCheckResult {
  double max_relative_error = 0;
  std::size_t parameters_checked = 0;
};

/// Compares a gradient routine against central differences of loss() on a
/// random subset of at least `min_params` parameters (all, if fewer exist).
/// Relative error is |a - n| / max(|a|, |n|, 1e-7).
template <class GradientFn = AnalyticGradient>
GradCheckResult grad_check(const Mlp& m, std::span<const Sample> batch, double epsilon, std::uint64_t seed = 0,
                           std::size_t min_params = 200, GradientFn gradient = {}) {
  if (!(epsilon >= 1e-6 && epsilon <= 1e-3)) throw InvalidInput("grad_check epsilon must lie in [1e-6, 1e-3]");
  std::vector<double> analytic(m.parameter_count());
  gradient(m, batch, analytic);

  std::vector<std::size_t> order(m.parameter_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  CounterRng rng(seed, stream_id({0x6763ull}));
  const std::size_t count = std::min(order.size(), min_params);
  for (std::size_t i = 0; i < count; ++i) std::swap(order[i], order[i + rng.below(order.size() - i)]);

  Mlp probe = m;
  GradCheckResult out;
  for (std::size_t c = 0; c < count; ++c) {
    const std::size_t i = order[c];
    const double saved = probe.params()[i];
    probe.params()[i] = saved + epsilon;
    const double up = loss(probe, batch);
    probe.params()[i] = saved - epsilon;
    const double down = loss(probe, batch);
    probe.params()[i] = saved;
    const double numeric = (up - down) / (2 * epsilon);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-7});
    out.max_relative_error = std::max(out.max_relative_error, std::abs(analytic[i] - numeric) / denom);
  }
  out.parameters_checked = count;
  return out;
}

// --- training --------------------------------------------------------------

enum class OptimizerKind { Sgd, Adam };

inline std::string to_string(OptimizerKind k) { return k == OptimizerKind::Sgd ? "sgd" : "adam"; }

inline OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "sgd") return OptimizerKind::Sgd;
  if (s == "adam") return OptimizerKind::Adam;
  throw InvalidInput("unknown optimizer '" + s + "', expected sgd or adam");
}

struct TrainConfig {
  std::vector<std::size_t> hidden = {64, 64};
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::Adam;
  std::uint64_t max_updates = 20000;
  /// Passes over the dataset; 0 means no limit.
  std::uint64_t max_epochs = 0;
  std::uint64_t eval_every = 100;
  /// Validation checks without improvement before stopping; 0 disables.
  std::uint64_t patience = 20;
  /// Patience is not checked before this many updates.
  std::uint64_t min_updates = 0;
  std::uint64_t seed = 0;

  void validate() const {
    if (batch_size == 0) throw InvalidInput("batch size must be positive");
    if (!(learning_rate > 0) || !std::isfinite(learning_rate)) throw InvalidInput("learning rate must be positive");
    if (max_updates == 0) throw InvalidInput("max updates must be positive");
    if (eval_every == 0) throw InvalidInput("evaluation cadence must be at least 1");
    for (auto h : hidden)
      if (h == 0) throw InvalidInput("hidden layer sizes must be positive");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["hidden"] = hidden;
    j["batch_size"] = batch_size;
    j["learning_rate"] = learning_rate;
    j["optimizer"] = to_string(optimizer);
    j["max_updates"] = max_updates;
    j["max_epochs"] = max_epochs;
    j["eval_every"] = eval_every;
    j["patience"] = patience;
    j["min_updates"] = min_updates;
    j["seed"] = seed;
    return j;
  }

  static TrainConfig from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
    c.max_updates = j.at("max_updates").get<std::uint64_t>();
    c.max_epochs = j.at("max_epochs").get<std::uint64_t>();
    c.eval_every = j.at("eval_every").get<std::uint64_t>();
    c.patience = j.at("patience").get<std::uint64_t>();
    c.min_updates = j.value("min_updates", std::uint64_t{0});
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
  }
};

inline std::vector<std::size_t> layer_sizes(std::size_t inputs, const TrainConfig& cfg) {
  std::vector<std::size_t> s{inputs};
  s.insert(s.end(), cfg.hidden.begin(), cfg.hidden.end());
  s.push_back(1);
  return s;
}

class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double lr, std::size_t n) : kind_(kind), lr_(lr) {
    if (kind_ == OptimizerKind::Adam) {
      m_.assign(n, 0.0);
      v_.assign(n, 0.0);
    }
  }

  void step(std::span<double> params, std::span<const double> grad) {
    if (kind_ == OptimizerKind::Sgd) {
      for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grad[i];
      return;
    }
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = kBeta1 * m_[i] + (1 - kBeta1) * grad[i];
      v_[i] = kBeta2 * v_[i] + (1 - kBeta2) * grad[i] * grad[i];
      params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
    }
  }

 private:
  OptimizerKind kind_;
  double lr_;
  std::vector<double> m_, v_;
  std::uint64_t t_ = 0;
};

struct TrainingRow {
  std::uint32_t feature_row = 0;
  double target = 0;
};

struct TrainingSet {
  const FeatureTable* features = nullptr;
  std::vector<TrainingRow> rows;
  /// Evaluations spent building the targets; the x coordinate of the
  /// evaluation-equated axis.
  std::uint64_t evaluations = 0;
};

inline TrainingSet make_training_set(const Dataset& ds, const FeatureTable& features) {
  TrainingSet ts{&features, {}, ds.evaluations};
  ts.rows.reserve(ds.examples.size());
  for (const auto& e : ds.examples) ts.rows.push_back({features.index_of(e.observable), e.target});
  return ts;
}

struct ValidationPoint {
  std::uint32_t feature_row = 0;
  double truth = 0;
  double weight = 0;
};

struct ValidationSet {
  const FeatureTable* features = nullptr;
  std::vector<ValidationPoint> points;
};

/// Every observable of the provider with its exact value and deal weight.
/// Throws NoGroundTruth when any observable lacks one.
template <InformationSetProvider P>
ValidationSet make_validation_set(const P& provider, const FeatureTable& features) {
  ValidationSet vs{&features, {}};
  for (auto x : provider.observables())
    vs.points.push_back({features.index_of(x), require_ground_truth(provider, x), provider.observable_weight(x)});
  return vs;
}

struct ValidationError {
  double mae = 0;
  double mse = 0;
  /// MAE weighted by how often each observable is dealt.
  double mae_weighted = 0;
};

inline ValidationError validation_error(const Mlp& m, const ValidationSet& vs) {
  detail::Workspace ws(m);
  ValidationError e;
  double wsum = 0;
  for (const auto& p : vs.points) {
    const auto x = vs.features->row(p.feature_row);
    m.check_input(x);
    const double d = ws.forward(m, x) - p.truth;
    e.mae += std::abs(d);
    e.mse += d * d;
    e.mae_weighted += p.weight * std::abs(d);
    wsum += p.weight;
  }
  const auto n = static_cast<double>(vs.points.size());
  e.mae /= n;
  e.mse /= n;
  e.mae_weighted = wsum > 0 ? e.mae_weighted / wsum : 0.0;
  return e;
}

struct TrajectoryPoint {
  std::uint64_t updates = 0;
  std::uint64_t evaluations = 0;
  double mae = 0;
  double mse = 0;
  double mae_weighted = 0;
  /// Mean training batch loss since the previous point (0 at update 0).
  double train_loss = 0;
};

enum class StopReason { MaxUpdates, MaxEpochs, Patience };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::MaxUpdates: return "max_updates";
    case StopReason::MaxEpochs: return "max_epochs";
    case StopReason::Patience: return "patience";
  }
  return "unknown";
}

struct TrainResult {
  Mlp best;
  std::vector<TrajectoryPoint> trajectory;
  std::size_t best_index = 0;
  std::uint64_t updates = 0;
  StopReason stop = StopReason::MaxUpdates;

  const TrajectoryPoint& best_point() const { return trajectory[best_index]; }
};

/// Mini-batch training from `init`. Validation runs at update 0, every
/// eval_every updates, at each update listed in `extra_checks` and at the last
/// update. Deterministic given the config.
inline TrainResult train(Mlp init, const TrainingSet& data, const ValidationSet& validation, const TrainConfig& cfg,
                         std::span<const std::uint64_t> extra_checks = {}) {
  cfg.validate();
  if (data.rows.empty()) throw InvalidInput("cannot train on an empty dataset");
  if (data.features == nullptr || validation.features == nullptr) throw InvalidInput("missing feature table");
  if (data.features->width() != init.inputs() || validation.features->width() != init.inputs())
    throw InvalidInput("feature length mismatch: network expects " + std::to_string(init.inputs()) + ", got " +
                       std::to_string(data.features->width()));

  TrainResult result;
  Mlp model = std::move(init);
  Optimizer opt(cfg.optimizer, cfg.learning_rate, model.parameter_count());
  detail::Workspace ws(model);
  std::vector<double> grad(model.parameter_count());
  std::vector<Sample> batch(cfg.batch_size);

  const std::size_t n = data.rows.size();
  std::vector<std::uint32_t> order(n);
  std::uint64_t epoch = 0;
  std::size_t cursor = n;  // forces a shuffle before the first batch
  auto reshuffle = [&] {
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    CounterRng rng(cfg.seed, stream_id({0x73687566ull, epoch}));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    cursor = 0;
  };

  std::uint64_t update_limit = cfg.max_updates;
  StopReason limit_reason = StopReason::MaxUpdates;
  if (cfg.max_epochs > 0) {
    const std::uint64_t by_epochs = (cfg.max_epochs * n + cfg.batch_size - 1) / cfg.batch_size;
    if (by_epochs < update_limit) {
      update_limit = by_epochs;
      limit_reason = StopReason::MaxEpochs;
    }
  }

  double loss_sum = 0;
  std::uint64_t loss_count = 0;
  std::uint64_t since_best = 0;
  auto record = [&](std::uint64_t u) {
    if (!model.all_finite()) throw TrainingDiverged("non-finite parameters at update " + std::to_string(u), u);
    const auto e = validation_error(model, validation);
    result.trajectory.push_back({u, data.evaluations, e.mae, e.mse, e.mae_weighted,
                                 loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0});
    loss_sum = 0;
    loss_count = 0;
    if (result.trajectory.size() == 1 || e.mae < result.best_point().mae) {
      result.best_index = result.trajectory.size() - 1;
      result.best = model;
      since_best = 0;
    } else {
      ++since_best;
    }
  };

  record(0);
  std::uint64_t u = 0;
  result.stop = limit_reason;
  while (u < update_limit) {
    for (auto& s : batch) {
      if (cursor == n) {
        reshuffle();
        ++epoch;
      }
      const auto& row = data.rows[order[cursor++]];
      s = {data.features->row(row.feature_row), row.target};
    }
    const double l = loss_and_gradient(model, batch, grad, ws);
    if (!std::isfinite(l)) throw TrainingDiverged("loss is not finite at update " + std::to_string(u + 1), u + 1);
    opt.step(model.params(), grad);
    ++u;
    loss_sum += l;
    ++loss_count;
    if (u % cfg.eval_every == 0 || u == update_limit ||
        std::find(extra_checks.begin(), extra_checks.end(), u) != extra_checks.end()) {
      record(u);
      if (cfg.patience > 0 && since_best >= cfg.patience && u >= cfg.min_updates) {
        result.stop = StopReason::Patience;
        break;
      }
    }
  }
  result.updates = u;
  return result;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string trajectory_to_csv(const std::vector<TrajectoryPoint>& t) {
  std::string out = "updates,evaluations,mae,mse\n";
  for (const auto& p : t)
    out += std::to_string(p.updates) + ',' + std::to_string(p.evaluations) + ',' + format_double(p.mae) + ',' +
           format_double(p.mse) + '\n';
  return out;
}

// --- checkpoints -----------------------------------------------------------
//
// Layout, all integers and floats little-endian:
//   "ISEVMLP1"  u32 version=1  u32 activation (0 = tanh hidden, sigmoid out)
//   u32 layer_count  u32 sizes[layer_count]  u64 seed
//   u32 config_bytes  config JSON  f64 params[parameter_count]

struct Checkpoint {
  Mlp model;
  TrainConfig config;
  std::uint64_t seed = 0;
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  std::uint64_t get(int bytes) {
    if (pos_ + static_cast<std::size_t>(bytes) > data_.size()) throw ParseError("truncated checkpoint");
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t{static_cast<unsigned char>(data_[pos_++])} << (8 * i);
    return v;
  }
  std::string_view take(std::size_t n) {
    if (pos_ + n > data_.size()) throw ParseError("truncated checkpoint");
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string encode_checkpoint(const Checkpoint& c) {
  std::string out = "ISEVMLP1";
  detail::put_u32(out, 1);
  detail::put_u32(out, 0);
  detail::put_u32(out, static_cast<std::uint32_t>(c.model.sizes().size()));
  for (auto s : c.model.sizes()) detail::put_u32(out, static_cast<std::uint32_t>(s));
  detail::put_u64(out, c.seed);
  const std::string cfg = c.config.to_json().dump();
  detail::put_u32(out, static_cast<std::uint32_t>(cfg.size()));
  out += cfg;
  for (double v : c.model.params()) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    detail::put_u64(out, bits);
  }
  return out;
}

inline Checkpoint decode_checkpoint(std::string_view data) {
  detail::Reader r(data);
  if (r.take(8) != "ISEVMLP1") throw ParseError("not an iseval checkpoint");
  if (r.get(4) != 1) throw ParseError("unsupported checkpoint version");
  if (r.get(4) != 0) throw ParseError("unsupported activation");
  const auto layers = r.get(4);
  if (layers < 2 || layers > 64) throw ParseError("bad layer count in checkpoint");
  std::vector<std::size_t> sizes;
  for (std::uint64_t i = 0; i < layers; ++i) sizes.push_back(r.get(4));
  Checkpoint c;
  c.seed = r.get(8);
  const auto cfg_len = r.get(4);
  c.config = TrainConfig::from_json(nlohmann::json::parse(r.take(cfg_len)));
  c.model = Mlp::zeros(sizes);
  for (double& v : c.model.params()) {
    const std::uint64_t bits = r.get(8);
    std::memcpy(&v, &bits, sizeof v);
  }
  if (!r.done()) throw ParseError("trailing bytes in checkpoint");
  return c;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& c) { write_file(path, encode_checkpoint(c)); }
inline Checkpoint load_checkpoint(const std::string& path) { return decode_checkpoint(read_file(path)); }

}  // namespace iseval
