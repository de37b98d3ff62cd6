#pragma once

// Information-set providers and budgeted dataset generation.
//
// A provider owns the game: it deals observables x, draws one hidden
// completion h uniformly from I(x) and evaluates f(x, h). generate_dataset
// turns a budget of N such evaluations into floor(N/k) examples whose targets
// are k-sample means.

#include <atomic>
#include <concepts>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iseval/cards.hpp"
#include "iseval/equity.hpp"
#include "iseval/error.hpp"
#include "iseval/golden.hpp"
#include "iseval/parallel.hpp"
#include "iseval/rng.hpp"

#include <json.hpp>

namespace iseval {

struct ObservableId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(const ObservableId&, const ObservableId&) = default;
};

template <class P>
concept InformationSetProvider = requires(const P& p, ObservableId x, CounterRng& rng) {
  { p.id() } -> std::convertible_to<std::string>;
  { p.observables() } -> std::same_as<std::vector<ObservableId>>;
  /// Probability that sample_observable returns x.
  { p.observable_weight(x) } -> std::same_as<double>;
  { p.sample_observable(rng) } -> std::same_as<ObservableId>;
  { p.sample_and_evaluate(x, rng) } -> std::same_as<double>;
  /// |I(x)|, or nullopt when the set is effectively infinite.
  { p.set_size(x) } -> std::same_as<std::optional<std::uint64_t>>;
  /// Every f(x, h) over I(x); only requested when |I(x)| is small.
  { p.evaluate_all(x) } -> std::same_as<std::vector<double>>;
  { p.ground_truth(x) } -> std::same_as<std::optional<double>>;
};

template <InformationSetProvider P>
double require_ground_truth(const P& p, ObservableId x) {
  if (auto v = p.ground_truth(x)) return *v;
  throw NoGroundTruth("provider " + std::string(p.id()) + " has no ground truth for observable " +
                      std::to_string(x.value));
}

/// Wraps a provider and counts every f(x, h) evaluation it performs.
template <InformationSetProvider P>
class EvaluationCounter {
 public:
  explicit EvaluationCounter(const P& inner) : inner_(&inner) {}

  std::string id() const { return inner_->id(); }
  std::vector<ObservableId> observables() const { return inner_->observables(); }
  double observable_weight(ObservableId x) const { return inner_->observable_weight(x); }
  ObservableId sample_observable(CounterRng& rng) const { return inner_->sample_observable(rng); }
  double sample_and_evaluate(ObservableId x, CounterRng& rng) const {
    count_.fetch_add(1, std::memory_order_relaxed);
    return inner_->sample_and_evaluate(x, rng);
  }
  std::optional<std::uint64_t> set_size(ObservableId x) const { return inner_->set_size(x); }
  std::vector<double> evaluate_all(ObservableId x) const {
    auto all = inner_->evaluate_all(x);
    count_.fetch_add(all.size(), std::memory_order_relaxed);
    return all;
  }
  std::optional<double> ground_truth(ObservableId x) const { return inner_->ground_truth(x); }

  std::uint64_t evaluations() const { return count_.load(); }

 private:
  const P* inner_;
  mutable std::atomic<std::uint64_t> count_{0};
};

struct BudgetPlan {
  std::uint64_t total_budget = 0;
  std::uint64_t samples_per_example = 1;

  BudgetPlan(std::uint64_t n_total, std::uint64_t k) : total_budget(n_total), samples_per_example(k) {
    if (k < 1) throw InvalidInput("samples per example k must be at least 1");
  }

  /// Dataset size; the remainder N mod k is left unspent.
  std::uint64_t examples() const noexcept { return total_budget / samples_per_example; }
};

struct LabeledExample {
  ObservableId observable;
  double target = 0;
  std::uint32_t samples_used = 0;
};

struct Dataset {
  std::vector<LabeledExample> examples;
  std::uint64_t total_budget = 0;
  std::uint64_t samples_per_example = 1;
  std::uint64_t seed = 0;
  std::string provider_id;
  /// Read from the provider-side counter, not derived from the plan.
  std::uint64_t evaluations = 0;
};

/// Stream of the i-th example of a dataset.
inline std::uint64_t example_stream(std::uint64_t index) { return stream_id({0x6461ull, index}); }

/// Labels floor(N/k) examples. Example i uses its own stream, so the result
/// does not depend on `workers`. When |I(x)| <= k the whole set is evaluated
/// once instead and samples_used = |I(x)|.
template <InformationSetProvider P>
Dataset generate_dataset(const P& provider, const BudgetPlan& plan, std::uint64_t seed, unsigned workers = 1) {
  EvaluationCounter<P> counted(provider);
  const std::uint64_t k = plan.samples_per_example;
  Dataset ds;
  ds.examples.resize(plan.examples());
  ds.total_budget = plan.total_budget;
  ds.samples_per_example = k;
  ds.seed = seed;
  ds.provider_id = provider.id();
  parallel_for(ds.examples.size(), workers, [&](std::size_t i) {
    try {
      CounterRng rng(seed, example_stream(i));
      LabeledExample ex;
      ex.observable = counted.sample_observable(rng);
      double sum = 0;
      const auto size = counted.set_size(ex.observable);
      if (size && *size <= k) {
        const auto all = counted.evaluate_all(ex.observable);
        for (double v : all) sum += v;
        ex.samples_used = static_cast<std::uint32_t>(all.size());
      } else {
        for (std::uint64_t j = 0; j < k; ++j) sum += counted.sample_and_evaluate(ex.observable, rng);
        ex.samples_used = static_cast<std::uint32_t>(k);
      }
      ex.target = sum / ex.samples_used;
      ds.examples[i] = ex;
    } catch (const ProviderError&) {
      throw;
    } catch (const std::exception& e) {
      throw ProviderError(e.what(), i);
    }
  });
  ds.evaluations = counted.evaluations();
  return ds;
}

/// Finite information sets given as explicit outcome multisets.
class SyntheticProvider {
 public:
  struct Entry {
    ObservableId id;
    std::vector<double> outcomes;
  };

  explicit SyntheticProvider(std::vector<Entry> entries, std::string name = "synthetic")
      : entries_(std::move(entries)), name_(std::move(name)) {
    if (entries_.empty()) throw InvalidInput("synthetic provider needs at least one observable");
    for (const auto& e : entries_) {
      if (e.outcomes.empty())
        throw InvalidInput("synthetic observable " + std::to_string(e.id.value) + " has an empty outcome multiset");
      for (double v : e.outcomes)
        if (!(v >= 0 && v <= 1)) throw InvalidInput("synthetic outcomes must lie in [0,1]");
      for (const auto& other : entries_)
        if (&other != &e && other.id == e.id)
          throw InvalidInput("duplicate synthetic observable " + std::to_string(e.id.value));
    }
  }

  std::string id() const { return name_; }

  std::vector<ObservableId> observables() const {
    std::vector<ObservableId> out;
    for (const auto& e : entries_) out.push_back(e.id);
    return out;
  }

  double observable_weight(ObservableId) const { return 1.0 / static_cast<double>(entries_.size()); }

  ObservableId sample_observable(CounterRng& rng) const { return entries_[rng.below(entries_.size())].id; }

  double sample_and_evaluate(ObservableId x, CounterRng& rng) const {
    const auto& o = entry(x).outcomes;
    return o[rng.below(o.size())];
  }

  std::optional<std::uint64_t> set_size(ObservableId x) const { return entry(x).outcomes.size(); }

  std::vector<double> evaluate_all(ObservableId x) const { return entry(x).outcomes; }

  std::optional<double> ground_truth(ObservableId x) const {
    const auto& o = entry(x).outcomes;
    return std::accumulate(o.begin(), o.end(), 0.0) / static_cast<double>(o.size());
  }

 private:
  const Entry& entry(ObservableId x) const {
    for (const auto& e : entries_)
      if (e.id == x) return e;
    throw InvalidInput("unknown synthetic observable " + std::to_string(x.value));
  }

  std::vector<Entry> entries_;
  std::string name_;
};

/// Heads-up preflop poker. x is a canonical hand (ObservableId = hand_index),
/// dealt by drawing one of the deck's hole pairs uniformly; h is a villain
/// hole plus a five-card board.
class PokerProvider {
 public:
  explicit PokerProvider(Deck deck = Deck::full(), std::shared_ptr<const GoldenTable> golden = nullptr)
      : deck_(std::move(deck)), eval_(deck_), golden_(std::move(golden)) {
    detail::require_nine_cards(deck_);
    if (golden_ && !(golden_->deck() == deck_)) throw InvalidInput("golden table deck does not match provider deck");
    const auto& cards = deck_.cards();
    for (std::size_t a = 0; a < cards.size(); ++a)
      for (std::size_t b = a + 1; b < cards.size(); ++b)
        hole_class_.push_back(static_cast<std::uint32_t>(hand_index(canonicalize(cards[a], cards[b]), deck_)));
    for (const auto& h : canonical_hands(deck_)) {
      const auto [c1, c2] = representative_hole(h);
      heroes_.push_back(CardSet{c1, c2});
    }
  }

  std::string id() const { return "poker:" + deck_.name(); }
  const Deck& deck() const noexcept { return deck_; }
  const GoldenTable* golden() const noexcept { return golden_.get(); }

  std::vector<ObservableId> observables() const {
    std::vector<ObservableId> out;
    for (int i = 0; i < canonical_hand_count(deck_); ++i) out.push_back({static_cast<std::uint32_t>(i)});
    return out;
  }

  double observable_weight(ObservableId x) const {
    return static_cast<double>(hand(x).class_size()) / static_cast<double>(hole_class_.size());
  }

  CanonicalHand hand(ObservableId x) const { return hand_from_index(static_cast<int>(x.value), deck_); }

  ObservableId sample_observable(CounterRng& rng) const { return {hole_class_[rng.below(hole_class_.size())]}; }

  double sample_and_evaluate(ObservableId x, CounterRng& rng) const {
    if (x.value >= heroes_.size()) throw InvalidInput("unknown poker observable " + std::to_string(x.value));
    const CardSet hero = heroes_[x.value];
    return evaluate_completion(eval_, hero, sample_completion(hero, deck_.cards(), rng)).value();
  }

  std::optional<std::uint64_t> set_size(ObservableId) const { return information_set_size(deck_); }

  std::vector<double> evaluate_all(ObservableId x) const {
    throw InvalidInput("information set of " + hand(x).code() + " is too large to enumerate per example");
  }

  std::optional<double> ground_truth(ObservableId x) const {
    if (!golden_) return std::nullopt;
    if (auto e = golden_->lookup(hand(x))) return e->equity;
    return std::nullopt;
  }

 private:
  Deck deck_;
  HandEvaluator eval_;
  std::shared_ptr<const GoldenTable> golden_;
  std::vector<std::uint32_t> hole_class_;
  std::vector<CardSet> heroes_;
};

static_assert(InformationSetProvider<SyntheticProvider>);
static_assert(InformationSetProvider<PokerProvider>);

// --- dataset files ---------------------------------------------------------

inline std::string dataset_to_csv(const Dataset& ds) {
  std::string out = "observable,target,samples_used\n";
  for (const auto& e : ds.examples)
    out += std::to_string(e.observable.value) + ',' + format_fixed(e.target, 9) + ',' + std::to_string(e.samples_used) + '\n';
  return out;
}

/// Sidecar metadata; golden_sha1 is the git blob id of the validation table, if any.
inline nlohmann::ordered_json dataset_metadata(const Dataset& ds, const std::string& golden_sha1 = "") {
  nlohmann::ordered_json j;
  j["N"] = ds.total_budget;
  j["k"] = ds.samples_per_example;
  j["n"] = ds.examples.size();
  j["seed"] = ds.seed;
  j["provider"] = ds.provider_id;
  j["evaluations"] = ds.evaluations;
  j["golden_sha1"] = golden_sha1;
  return j;
}

inline void save_dataset(const Dataset& ds, const std::string& csv_path, const std::string& golden_sha1 = "") {
  write_file(csv_path, dataset_to_csv(ds));
  std::string meta_path = csv_path;
  if (meta_path.ends_with(".csv")) meta_path.resize(meta_path.size() - 4);
  write_file(meta_path + ".json", dataset_metadata(ds, golden_sha1).dump(2) + "\n");
}

/// Reads a dataset CSV and its sidecar. Targets come back rounded to 9 decimals.
inline Dataset load_dataset(const std::string& csv_path) {
  Dataset ds;
  std::istringstream in(read_file(csv_path));
  std::string line;
  if (!std::getline(in, line) || line != "observable,target,samples_used")
    throw ParseError("dataset must start with header observable,target,samples_used");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    LabeledExample e;
    unsigned long id = 0, used = 0;
    double target = 0;
    if (std::sscanf(line.c_str(), "%lu,%lf,%lu", &id, &target, &used) != 3)
      throw ParseError("bad dataset row '" + line + "'");
    e.observable = {static_cast<std::uint32_t>(id)};
    e.target = target;
    e.samples_used = static_cast<std::uint32_t>(used);
    ds.examples.push_back(e);
  }
  std::string meta_path = csv_path;
  if (meta_path.ends_with(".csv")) meta_path.resize(meta_path.size() - 4);
  const auto meta = nlohmann::json::parse(read_file(meta_path + ".json"));
  ds.total_budget = meta.at("N").get<std::uint64_t>();
  ds.samples_per_example = meta.at("k").get<std::uint64_t>();
  ds.seed = meta.at("seed").get<std::uint64_t>();
  ds.provider_id = meta.at("provider").get<std::string>();
  ds.evaluations = meta.at("evaluations").get<std::uint64_t>();
  return ds;
}

}  // namespace iseval
