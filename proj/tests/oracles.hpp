#pragma once

// Slow reference implementations used only by tests. None of these call into
// the optimized code paths they are compared against.

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <vector>

#include "iseval/cards.hpp"
#include "iseval/handrank.hpp"

namespace iseval::oracle {

/// Category of five cards from rank multiplicities and an explicit list of
/// straights. Deck-aware only through its lowest rank.
inline Category naive_category(const std::array<Card, 5>& cards, int lowest_rank = 0) {
  std::map<int, int> counts;
  std::set<int> suits;
  for (auto c : cards) {
    ++counts[c.rank];
    suits.insert(c.suit);
  }
  std::vector<int> shape;
  for (auto [r, n] : counts) shape.push_back(n);
  std::sort(shape.rbegin(), shape.rend());

  bool straight = false;
  if (counts.size() == 5) {
    std::vector<std::set<int>> runs;
    for (int top = lowest_rank + 4; top <= 12; ++top) runs.push_back({top - 4, top - 3, top - 2, top - 1, top});
    runs.push_back({12, lowest_rank, lowest_rank + 1, lowest_rank + 2, lowest_rank + 3});
    std::set<int> ranks;
    for (auto [r, n] : counts) ranks.insert(r);
    straight = std::find(runs.begin(), runs.end(), ranks) != runs.end();
  }
  const bool flush = suits.size() == 1;

  if (straight && flush) return Category::StraightFlush;
  if (shape == std::vector<int>{4, 1}) return Category::Quads;
  if (shape == std::vector<int>{3, 2}) return Category::FullHouse;
  if (flush) return Category::Flush;
  if (straight) return Category::Straight;
  if (shape == std::vector<int>{3, 1, 1}) return Category::Trips;
  if (shape == std::vector<int>{2, 2, 1}) return Category::TwoPair;
  if (shape == std::vector<int>{2, 1, 1, 1}) return Category::Pair;
  return Category::HighCard;
}

/// Maximum of rank5 over all 21 five-card subsets of seven cards.
inline HandRank best_of_21(const std::array<Card, 7>& cards, const Deck& deck = Deck::full()) {
  HandRank best;
  bool first = true;
  for (int skip1 = 0; skip1 < 7; ++skip1)
    for (int skip2 = skip1 + 1; skip2 < 7; ++skip2) {
      std::array<Card, 5> five{};
      int n = 0;
      for (int i = 0; i < 7; ++i)
        if (i != skip1 && i != skip2) five[static_cast<std::size_t>(n++)] = cards[static_cast<std::size_t>(i)];
      const HandRank r = rank5(five, deck);
      if (first || r > best) best = r;
      first = false;
    }
  return best;
}

}  // namespace iseval::oracle

namespace iseval::oracle {

struct NaiveEquity {
  std::uint64_t hero_half_points = 0;
  std::uint64_t villain_half_points = 0;
  std::uint64_t completions = 0;
};

/// Exact equity of one concrete hole by a plain double loop: every villain
/// hole, then every board from what is left. No symmetry, no sorting.
inline NaiveEquity naive_exact_equity(Card h1, Card h2, const Deck& deck) {
  const HandEvaluator eval(deck);
  std::vector<Card> rest;
  for (auto c : deck.cards())
    if (c != h1 && c != h2) rest.push_back(c);
  const std::size_t n = rest.size();
  NaiveEquity out;
  for (std::size_t v1 = 0; v1 < n; ++v1)
    for (std::size_t v2 = v1 + 1; v2 < n; ++v2) {
      std::vector<Card> left;
      for (std::size_t i = 0; i < n; ++i)
        if (i != v1 && i != v2) left.push_back(rest[i]);
      const std::size_t m = left.size();
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
          for (std::size_t c = b + 1; c < m; ++c)
            for (std::size_t d = c + 1; d < m; ++d)
              for (std::size_t e = d + 1; e < m; ++e) {
                const CardSet board{left[a], left[b], left[c], left[d], left[e]};
                const auto hero = eval.evaluate(board | CardSet{h1, h2});
                const auto villain = eval.evaluate(board | CardSet{rest[v1], rest[v2]});
                out.hero_half_points += hero > villain ? 2 : hero == villain ? 1 : 0;
                out.villain_half_points += villain > hero ? 2 : villain == hero ? 1 : 0;
                ++out.completions;
              }
    }
  return out;
}

}  // namespace iseval::oracle
