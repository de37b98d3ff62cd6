#pragma once

// Heads-up preflop equity: the showdown evaluator, exact information-set
// means, k-sample Monte Carlo estimates, and their error profile.
//
// Outcomes are counted in half-points (loss 0, tie 1, win 2) so every sum is
// an exact integer and results never depend on reduction order.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iseval/cards.hpp"
#include "iseval/error.hpp"
#include "iseval/handrank.hpp"
#include "iseval/parallel.hpp"
#include "iseval/rng.hpp"

namespace iseval {

/// Result of one completion from the hero's side: 0, 0.5 or 1.
class Outcome {
 public:
  static constexpr Outcome loss() noexcept { return Outcome(0); }
  static constexpr Outcome tie() noexcept { return Outcome(1); }
  static constexpr Outcome win() noexcept { return Outcome(2); }

  static constexpr Outcome compare(HandRank hero, HandRank villain) noexcept {
    return Outcome(hero > villain ? 2 : hero == villain ? 1 : 0);
  }

  constexpr int half_points() const noexcept { return half_points_; }
  constexpr double value() const noexcept { return 0.5 * half_points_; }
  constexpr Outcome complement() const noexcept { return Outcome(2 - half_points_); }

  friend constexpr auto operator<=>(const Outcome&, const Outcome&) = default;

 private:
  constexpr explicit Outcome(int hp) : half_points_(static_cast<std::uint8_t>(hp)) {}
  std::uint8_t half_points_;
};

struct Showdown {
  std::array<Card, 2> hero_hole;
  std::array<Card, 2> villain_hole;
  std::array<Card, 5> board;
};

inline Outcome showdown_value(const Showdown& s, const Deck& deck = Deck::full()) {
  std::array<Card, 9> all{};
  std::copy(s.hero_hole.begin(), s.hero_hole.end(), all.begin());
  std::copy(s.villain_hole.begin(), s.villain_hole.end(), all.begin() + 2);
  std::copy(s.board.begin(), s.board.end(), all.begin() + 4);
  detail::check_hand(all, deck);
  const HandEvaluator eval(deck);
  const CardSet board(s.board);
  return Outcome::compare(eval.evaluate(board | CardSet(s.hero_hole)), eval.evaluate(board | CardSet(s.villain_hole)));
}

struct EquityEstimate {
  double mean = 0;
  std::uint64_t samples_used = 0;
  bool exact = false;
  /// Sum of outcomes in half-points; mean = half_points / (2 * samples_used).
  std::uint64_t half_points = 0;

  static EquityEstimate from_half_points(std::uint64_t hp, std::uint64_t samples, bool exact) {
    return {samples == 0 ? 0.0 : static_cast<double>(hp) / (2.0 * static_cast<double>(samples)), samples, exact, hp};
  }
};

constexpr std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Number of (villain hole, board) completions of one hole hand.
inline std::uint64_t information_set_size(const Deck& deck) {
  const auto n = static_cast<std::uint64_t>(deck.size());
  return binomial(n - 2, 2) * binomial(n - 4, 5);
}

namespace detail {

inline void require_nine_cards(const Deck& deck) {
  if (deck.size() < 9) throw InvalidInput("deck " + deck.name() + " is too small for a heads-up showdown");
}

/// Suit permutations that map a card set onto itself.
inline std::vector<SuitPermutation> stabilizer(CardSet s) {
  std::vector<SuitPermutation> out;
  for (const auto& p : suit_permutations())
    if (permute(s, p) == s) out.push_back(p);
  return out;
}

/// Orbit size of `board` under `group` if board is the orbit's minimum, else 0.
inline std::uint64_t orbit_weight_if_canonical(CardSet board, std::span<const SuitPermutation> group) {
  std::uint64_t fixed = 0;
  for (const auto& p : group) {
    const CardSet img = permute(board, p);
    if (img.bits() < board.bits()) return 0;
    fixed += img == board;
  }
  return group.size() / fixed;
}

/// Calls f(CardSet board) for every 5-subset of `cards` whose first card is cards[first].
template <class F>
void for_each_board_from(std::span<const Card> cards, std::size_t first, F&& f) {
  const std::size_t n = cards.size();
  const CardSet c0{cards[first]};
  for (std::size_t b = first + 1; b < n; ++b) {
    const CardSet c1 = c0 | CardSet{cards[b]};
    for (std::size_t c = b + 1; c < n; ++c) {
      const CardSet c2 = c1 | CardSet{cards[c]};
      for (std::size_t d = c + 1; d < n; ++d) {
        const CardSet c3 = c2 | CardSet{cards[d]};
        for (std::size_t e = d + 1; e < n; ++e) f(c3 | CardSet{cards[e]});
      }
    }
  }
}

}  // namespace detail

/// Exact equity of one class: mean outcome over every villain hole and board
/// drawn from the cards left after the hero's representative hole.
///
/// Boards are enumerated up to the suit permutations that fix the hero's
/// hole (2, 4 or 6 of them), each canonical board weighted by its orbit size.
inline EquityEstimate exact_equity(const CanonicalHand& hand, const Deck& deck, unsigned workers = 1) {
  detail::require_nine_cards(deck);
  hand_index(hand, deck);  // membership check
  const auto [h1, h2] = representative_hole(hand);
  const CardSet hero{h1, h2};
  const auto group = detail::stabilizer(hero);
  std::vector<Card> rest;
  for (auto c : deck.cards())
    if (!hero.contains(c)) rest.push_back(c);

  const HandEvaluator eval(deck);
  std::vector<std::uint64_t> per_first(rest.size(), 0);
  parallel_for(rest.size(), workers, [&](std::size_t first) {
    std::uint64_t hp = 0;
    std::vector<Card> villains;
    villains.reserve(rest.size());
    detail::for_each_board_from(rest, first, [&](CardSet board) {
      const std::uint64_t w = detail::orbit_weight_if_canonical(board, group);
      if (w == 0) return;
      const HandRank hero_rank = eval.evaluate(board | hero);
      villains.clear();
      for (auto c : rest)
        if (!board.contains(c)) villains.push_back(c);
      std::uint64_t board_hp = 0;
      for (std::size_t i = 0; i < villains.size(); ++i) {
        const CardSet with_first = board | CardSet{villains[i]};
        for (std::size_t j = i + 1; j < villains.size(); ++j)
          board_hp += static_cast<std::uint64_t>(
              Outcome::compare(hero_rank, eval.evaluate(with_first | CardSet{villains[j]})).half_points());
      }
      hp += w * board_hp;
    });
    per_first[first] = hp;
  });
  const std::uint64_t total = std::accumulate(per_first.begin(), per_first.end(), std::uint64_t{0});
  return EquityEstimate::from_half_points(total, information_set_size(deck), true);
}

/// Exact equities of every class of the deck, indexed by hand_index.
///
/// Enumerates boards up to all 24 suit permutations. For each canonical board
/// every remaining hole pair is ranked once; sorting by rank then gives, per
/// hole, the number of beaten and tied disjoint villain holes by inclusion-
/// exclusion over per-card counts. Class totals are invariant under suit
/// permutation, so each canonical board contributes orbit_size times.
inline std::vector<EquityEstimate> exact_table(const Deck& deck, unsigned workers = 1) {
  detail::require_nine_cards(deck);
  const auto& cards = deck.cards();
  const int n = deck.size();

  std::vector<std::pair<CardSet, std::uint64_t>> boards;
  const auto& all_perms = suit_permutations();
  for (std::size_t first = 0; first < cards.size(); ++first)
    detail::for_each_board_from(cards, first, [&](CardSet board) {
      if (const auto w = detail::orbit_weight_if_canonical(board, all_perms); w != 0) boards.emplace_back(board, w);
    });

  const HandEvaluator eval(deck);
  constexpr int kMaxCards = 52;
  // Per-hole half-point totals, hole (i<j) of card indices at [i*52+j].
  const std::size_t chunks = std::min<std::size_t>(boards.size(), 64);
  std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(kMaxCards * kMaxCards, 0));
  parallel_for(chunks, workers, [&](std::size_t chunk) {
    auto& acc = partial[chunk];
    std::vector<std::uint64_t> keyed;  // rank << 16 | a << 8 | b
    std::array<std::uint32_t, kMaxCards> below_with{}, tie_with{};
    const std::size_t begin = boards.size() * chunk / chunks;
    const std::size_t end = boards.size() * (chunk + 1) / chunks;
    for (std::size_t bi = begin; bi < end; ++bi) {
      const auto [board, weight] = boards[bi];
      keyed.clear();
      for (int a = 0; a < n; ++a) {
        if (board.contains(cards[a])) continue;
        const CardSet with_a = board | CardSet{cards[a]};
        for (int b = a + 1; b < n; ++b) {
          if (board.contains(cards[b])) continue;
          const auto r = eval.evaluate(with_a | CardSet{cards[b]}).value();
          keyed.push_back(std::uint64_t{r} << 16 | static_cast<std::uint64_t>(a) << 8 | static_cast<std::uint64_t>(b));
        }
      }
      std::sort(keyed.begin(), keyed.end());
      below_with.fill(0);
      std::uint32_t below = 0;
      for (std::size_t g = 0; g < keyed.size();) {
        std::size_t h = g;
        while (h < keyed.size() && (keyed[h] >> 16) == (keyed[g] >> 16)) ++h;
        tie_with.fill(0);
        for (std::size_t i = g; i < h; ++i) {
          ++tie_with[(keyed[i] >> 8) & 0xFF];
          ++tie_with[keyed[i] & 0xFF];
        }
        const auto ties = static_cast<std::uint32_t>(h - g);
        for (std::size_t i = g; i < h; ++i) {
          const auto a = (keyed[i] >> 8) & 0xFF;
          const auto b = keyed[i] & 0xFF;
          const std::uint64_t beaten = below - below_with[a] - below_with[b];
          const std::uint64_t tied = ties - tie_with[a] - tie_with[b] + 1;
          acc[a * kMaxCards + b] += weight * (2 * beaten + tied);
        }
        for (std::size_t i = g; i < h; ++i) {
          ++below_with[(keyed[i] >> 8) & 0xFF];
          ++below_with[keyed[i] & 0xFF];
        }
        below += ties;
        g = h;
      }
    }
  });

  std::vector<std::uint64_t> per_hole(kMaxCards * kMaxCards, 0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < per_hole.size(); ++i) per_hole[i] += p[i];

  const auto hands = canonical_hands(deck);
  std::vector<std::uint64_t> class_hp(hands.size(), 0);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      class_hp[static_cast<std::size_t>(hand_index(canonicalize(cards[a], cards[b]), deck))] +=
          per_hole[static_cast<std::size_t>(a * kMaxCards + b)];

  std::vector<EquityEstimate> out;
  out.reserve(hands.size());
  const std::uint64_t set_size = information_set_size(deck);
  for (std::size_t i = 0; i < hands.size(); ++i) {
    const auto holes = static_cast<std::uint64_t>(hands[i].class_size());
    // Every hole of a class has the same equity; divide the class sum back out.
    EquityEstimate e = EquityEstimate::from_half_points(class_hp[i] / holes, set_size, true);
    out.push_back(e);
  }
  return out;
}

/// One uniform completion (villain hole + board) for a fixed hero hole.
/// Cards are distinct within a completion; completions are independent.
struct Completion {
  CardSet villain;
  CardSet board;
};

inline Completion sample_completion(CardSet hero, const std::vector<Card>& deck_cards, CounterRng& rng) {
  CardSet used = hero;
  std::array<Card, 7> drawn{};
  for (auto& c : drawn) {
    do c = deck_cards[rng.below(deck_cards.size())];
    while (used.contains(c));
    used.add(c);
  }
  return {CardSet{drawn[0], drawn[1]}, CardSet{drawn[2], drawn[3], drawn[4], drawn[5], drawn[6]}};
}

inline Outcome evaluate_completion(const HandEvaluator& eval, CardSet hero, const Completion& c) {
  return Outcome::compare(eval.evaluate(hero | c.board), eval.evaluate(c.villain | c.board));
}

/// Stream used by the k-sample estimate of a class for one trial.
inline std::uint64_t mc_stream(const CanonicalHand& hand, std::uint64_t trial) {
  return stream_id({0x6D63ull, hand.high_rank, hand.low_rank, static_cast<std::uint64_t>(hand.suited), trial});
}

/// Sum in half-points of k independent uniform completions of the hero's hole.
inline std::uint64_t mc_half_points(const HandEvaluator& eval, CardSet hero, const std::vector<Card>& deck_cards,
                                    std::uint64_t k, CounterRng& rng) {
  std::uint64_t hp = 0;
  for (std::uint64_t i = 0; i < k; ++i)
    hp += static_cast<std::uint64_t>(evaluate_completion(eval, hero, sample_completion(hero, deck_cards, rng)).half_points());
  return hp;
}

/// Mean outcome of k independent uniform completions. `trial` selects an
/// independent stream for repeated estimates of the same class and seed.
inline EquityEstimate mc_equity(const CanonicalHand& hand, std::uint64_t k, const Deck& deck, std::uint64_t seed,
                                std::uint64_t trial = 0) {
  if (k < 1) throw InvalidInput("k must be at least 1");
  detail::require_nine_cards(deck);
  hand_index(hand, deck);
  const auto [h1, h2] = representative_hole(hand);
  CounterRng rng(seed, mc_stream(hand, trial));
  const HandEvaluator eval(deck);
  return EquityEstimate::from_half_points(mc_half_points(eval, CardSet{h1, h2}, deck.cards(), k, rng), k, false);
}

/// Exact distribution of k-sample estimates observed for one class.
struct ErrorProfileCell {
  CanonicalHand hand;
  std::uint64_t k = 0;
  double truth = 0;
  /// counts[hp] = trials whose k samples summed to hp half-points (hp in [0, 2k]).
  std::vector<std::uint64_t> counts;

  std::uint64_t trials() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }
  double estimate(std::size_t hp) const { return static_cast<double>(hp) / (2.0 * static_cast<double>(k)); }

  double mean_estimate() const {
    double s = 0;
    for (std::size_t hp = 0; hp < counts.size(); ++hp) s += static_cast<double>(counts[hp]) * estimate(hp);
    return s / static_cast<double>(trials());
  }
  /// Unbiased sample variance of the estimates.
  double variance() const {
    const double m = mean_estimate();
    double s = 0;
    for (std::size_t hp = 0; hp < counts.size(); ++hp)
      s += static_cast<double>(counts[hp]) * (estimate(hp) - m) * (estimate(hp) - m);
    return s / static_cast<double>(trials() - 1);
  }
  double mean_abs_error() const {
    double s = 0;
    for (std::size_t hp = 0; hp < counts.size(); ++hp)
      s += static_cast<double>(counts[hp]) * std::abs(estimate(hp) - truth);
    return s / static_cast<double>(trials());
  }
};

struct ErrorProfileRow {
  std::uint64_t k = 0;
  double mean_abs_error = 0;
  /// |estimate - truth| over all trials and classes, bins of width 1/bins on [0, 1].
  std::vector<std::uint64_t> error_histogram;
  std::vector<ErrorProfileCell> cells;
};

/// Distribution of |k-sample estimate - exact equity| for each k.
/// `truths[i]` is the exact equity of `hands[i]`.
inline std::vector<ErrorProfileRow> error_profile(std::span<const CanonicalHand> hands, std::span<const double> truths,
                                                  std::span<const std::uint64_t> ks, std::uint64_t trials,
                                                  const Deck& deck, std::uint64_t seed, unsigned workers = 1,
                                                  std::size_t bins = 50) {
  if (hands.size() != truths.size()) throw InvalidInput("one exact equity is needed per hand");
  if (trials < 2) throw InvalidInput("error profile needs at least 2 trials");
  detail::require_nine_cards(deck);
  const HandEvaluator eval(deck);
  const auto& deck_cards = deck.cards();
  std::vector<ErrorProfileRow> rows;
  for (auto k : ks) {
    if (k < 1) throw InvalidInput("k must be at least 1");
    ErrorProfileRow row{k, 0, std::vector<std::uint64_t>(bins, 0), {}};
    double abs_sum = 0;
    for (std::size_t h = 0; h < hands.size(); ++h) {
      hand_index(hands[h], deck);
      const auto [h1, h2] = representative_hole(hands[h]);
      const CardSet hero{h1, h2};
      std::vector<std::uint32_t> totals(trials);
      parallel_for(trials, workers, [&](std::size_t t) {
        CounterRng rng(seed, stream_id({0x6570ull, h, k, t}));
        totals[t] = static_cast<std::uint32_t>(mc_half_points(eval, hero, deck_cards, k, rng));
      });
      ErrorProfileCell cell{hands[h], k, truths[h], std::vector<std::uint64_t>(2 * k + 1, 0)};
      for (auto hp : totals) ++cell.counts[hp];
      for (std::size_t hp = 0; hp < cell.counts.size(); ++hp) {
        if (cell.counts[hp] == 0) continue;
        const double err = std::abs(cell.estimate(hp) - cell.truth);
        abs_sum += static_cast<double>(cell.counts[hp]) * err;
        const auto bin = std::min(bins - 1, static_cast<std::size_t>(err * static_cast<double>(bins)));
        row.error_histogram[bin] += cell.counts[hp];
      }
      row.cells.push_back(std::move(cell));
    }
    row.mean_abs_error = abs_sum / static_cast<double>(trials * hands.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace iseval
