#pragma once

// Poker hand ranking.
//
// rank5 is a plain count-and-sort classifier. HandEvaluator is the hot path:
// it works on CardSet bitmasks and handles any 5..7 card hand directly, with
// no subset enumeration. Both produce the same packed HandRank encoding.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iseval/cards.hpp"
#include "iseval/error.hpp"

namespace iseval {

enum class Category : std::uint8_t {
  HighCard = 0,
  Pair,
  TwoPair,
  Trips,
  Straight,
  Flush,
  FullHouse,
  Quads,
  StraightFlush,
};

inline constexpr std::array<std::string_view, 9> kCategoryNames = {
    "HighCard", "Pair", "TwoPair", "Trips", "Straight", "Flush", "FullHouse", "Quads", "StraightFlush"};

/// Number of tiebreak ranks that are meaningful for each category.
inline constexpr std::array<int, 9> kTiebreakLength = {5, 4, 3, 3, 1, 5, 2, 2, 1};

/// Totally ordered hand value: category in bits 20..23, then up to five
/// tiebreak ranks as nibbles from most to least significant.
class HandRank {
 public:
  constexpr HandRank() = default;

  static constexpr HandRank make(Category cat, std::initializer_list<int> tiebreak) noexcept {
    std::uint32_t v = static_cast<std::uint32_t>(cat) << 20;
    int shift = 16;
    for (int r : tiebreak) {
      v |= static_cast<std::uint32_t>(r) << shift;
      shift -= 4;
    }
    return HandRank(v);
  }

  static constexpr HandRank from_value(std::uint32_t v) noexcept { return HandRank(v); }

  constexpr std::uint32_t value() const noexcept { return value_; }
  constexpr Category category() const noexcept { return static_cast<Category>(value_ >> 20); }

  std::vector<int> tiebreak() const {
    std::vector<int> out;
    const int n = kTiebreakLength[static_cast<int>(category())];
    for (int i = 0; i < n; ++i) out.push_back(static_cast<int>((value_ >> (16 - 4 * i)) & 0xF));
    return out;
  }

  /// "FullHouse [K,A]".
  std::string to_string() const {
    std::string out(kCategoryNames[static_cast<int>(category())]);
    out += " [";
    bool first = true;
    for (int r : tiebreak()) {
      if (!first) out += ',';
      out += kRankChars[static_cast<std::size_t>(r)];
      first = false;
    }
    return out + "]";
  }

  friend constexpr auto operator<=>(const HandRank&, const HandRank&) = default;

 private:
  constexpr explicit HandRank(std::uint32_t v) : value_(v) {}
  std::uint32_t value_ = 0;
};

namespace detail {

inline void check_hand(std::span<const Card> cards, const Deck& deck) {
  CardSet seen;
  for (auto c : cards) {
    if (!deck.contains(c)) throw InvalidInput("card " + format_card(c) + " is not in deck " + deck.name());
    if (seen.contains(c)) throw InvalidInput("duplicate card " + format_card(c));
    seen.add(c);
  }
}

/// Straight high card for every 13-bit rank mask, per lowest deck rank.
/// The ace also plays below the deck's four lowest ranks. Entry is high+1,
/// 0 when the mask holds no straight.
inline const std::array<std::uint8_t, 8192>& straight_table(int lowest_rank) {
  static const auto tables = [] {
    std::array<std::array<std::uint8_t, 8192>, kNumRanks - 4> out{};
    for (int low = 0; low < kNumRanks - 4; ++low) {
      for (unsigned mask = 0; mask < 8192; ++mask) {
        int high = -1;
        for (int top = kNumRanks - 1; top >= low + 4 && high < 0; --top) {
          const unsigned run = 0x1Fu << (top - 4);
          if ((mask & run) == run) high = top;
        }
        const unsigned wheel = (1u << 12) | (0xFu << low);
        if (high < 0 && (mask & wheel) == wheel) high = low + 3;
        out[static_cast<std::size_t>(low)][mask] = static_cast<std::uint8_t>(high + 1);
      }
    }
    return out;
  }();
  return tables[static_cast<std::size_t>(lowest_rank)];
}

/// Keeps the n highest set bits of a mask.
constexpr unsigned top_bits(unsigned mask, int n) noexcept {
  while (std::popcount(mask) > n) mask &= mask - 1;
  return mask;
}

constexpr int highest_bit(unsigned mask) noexcept { return 31 - std::countl_zero(mask); }

/// Packs the set bits of a mask (high to low) as tiebreak nibbles from `shift` down.
constexpr std::uint32_t pack_bits(unsigned mask, int shift) noexcept {
  std::uint32_t v = 0;
  while (mask != 0) {
    const int r = highest_bit(mask);
    v |= static_cast<std::uint32_t>(r) << shift;
    shift -= 4;
    mask &= ~(1u << r);
  }
  return v;
}

}  // namespace detail

/// Classifies exactly five cards by rank multiplicities.
inline HandRank rank5(std::span<const Card> cards, const Deck& deck = Deck::full()) {
  if (cards.size() != 5) throw InvalidInput("rank5 needs exactly 5 cards, got " + std::to_string(cards.size()));
  detail::check_hand(cards, deck);

  std::array<int, kNumRanks> counts{};
  for (auto c : cards) ++counts[c.rank];
  // (count, rank) groups, biggest group first, then higher rank.
  std::vector<std::pair<int, int>> groups;
  for (int r = kNumRanks - 1; r >= 0; --r)
    if (counts[static_cast<std::size_t>(r)] > 0) groups.emplace_back(counts[static_cast<std::size_t>(r)], r);
  std::stable_sort(groups.begin(), groups.end(), [](auto a, auto b) { return a.first > b.first; });

  const bool flush = std::all_of(cards.begin(), cards.end(), [&](Card c) { return c.suit == cards[0].suit; });
  int straight_high = -1;
  if (groups.size() == 5) {
    if (groups[0].second - groups[4].second == 4) {
      straight_high = groups[0].second;
    } else {
      const int low = deck.lowest_rank();
      if (groups[0].second == kNumRanks - 1 && groups[1].second == low + 3 && groups[4].second == low)
        straight_high = low + 3;
    }
  }

  auto ranks = [&](std::size_t from, std::size_t n) {
    std::uint32_t v = 0;
    int shift = 16;
    for (std::size_t i = from; i < from + n; ++i, shift -= 4)
      v |= static_cast<std::uint32_t>(groups[i].second) << shift;
    return v;
  };
  auto make = [](Category c, std::uint32_t tb) {
    return HandRank::from_value((static_cast<std::uint32_t>(c) << 20) | tb);
  };

  if (straight_high >= 0 && flush) return HandRank::make(Category::StraightFlush, {straight_high});
  if (groups[0].first == 4) return make(Category::Quads, ranks(0, 2));
  if (groups[0].first == 3 && groups[1].first == 2) return make(Category::FullHouse, ranks(0, 2));
  if (flush) return make(Category::Flush, ranks(0, 5));
  if (straight_high >= 0) return HandRank::make(Category::Straight, {straight_high});
  if (groups[0].first == 3) return make(Category::Trips, ranks(0, 3));
  if (groups[0].first == 2 && groups[1].first == 2) return make(Category::TwoPair, ranks(0, 3));
  if (groups[0].first == 2) return make(Category::Pair, ranks(0, 4));
  return make(Category::HighCard, ranks(0, 5));
}

/// Direct 5..7 card evaluator over CardSet masks. Immutable after
/// construction; safe to share across threads.
class HandEvaluator {
 public:
  explicit HandEvaluator(const Deck& deck = Deck::full())
      : straights_(&detail::straight_table(deck.lowest_rank())) {}

  /// Best five-card value of a set of 5 to 7 distinct cards. No validation.
  HandRank evaluate(CardSet hand) const noexcept {
    using detail::highest_bit;
    using detail::pack_bits;
    using detail::top_bits;
    const unsigned s0 = hand.suit_mask(0), s1 = hand.suit_mask(1), s2 = hand.suit_mask(2), s3 = hand.suit_mask(3);
    const unsigned any = s0 | s1 | s2 | s3;
    const unsigned two = (s0 & s1) | (s0 & s2) | (s0 & s3) | (s1 & s2) | (s1 & s3) | (s2 & s3);
    const unsigned three = (s0 & s1 & s2) | (s0 & s1 & s3) | (s0 & s2 & s3) | (s1 & s2 & s3);
    const unsigned four = s0 & s1 & s2 & s3;
    const auto& straights = *straights_;
    auto make = [](Category c, std::uint32_t tb) {
      return HandRank::from_value((static_cast<std::uint32_t>(c) << 20) | tb);
    };

    unsigned flush_mask = 0;
    for (unsigned s : {s0, s1, s2, s3})
      if (std::popcount(s) >= 5) flush_mask = s;
    if (flush_mask != 0) {
      if (const int sf = straights[flush_mask]; sf != 0)
        return make(Category::StraightFlush, static_cast<std::uint32_t>(sf - 1) << 16);
    }
    if (four != 0) {
      const int q = highest_bit(four);
      return make(Category::Quads, pack_bits(1u << q, 16) | pack_bits(top_bits(any & ~(1u << q), 1), 12));
    }
    if (three != 0) {
      const int t = highest_bit(three);
      const unsigned pairs = two & ~(1u << t);
      if (pairs != 0) return make(Category::FullHouse, pack_bits(1u << t, 16) | pack_bits(1u << highest_bit(pairs), 12));
    }
    if (flush_mask != 0) return make(Category::Flush, pack_bits(top_bits(flush_mask, 5), 16));
    if (const int st = straights[any]; st != 0) return make(Category::Straight, static_cast<std::uint32_t>(st - 1) << 16);
    if (three != 0) {
      const int t = highest_bit(three);
      return make(Category::Trips, pack_bits(1u << t, 16) | pack_bits(top_bits(any & ~(1u << t), 2), 12));
    }
    if (std::popcount(two) >= 2) {
      const unsigned pairs = top_bits(two, 2);
      return make(Category::TwoPair, pack_bits(pairs, 16) | pack_bits(top_bits(any & ~pairs, 1), 8));
    }
    if (two != 0) return make(Category::Pair, pack_bits(two, 16) | pack_bits(top_bits(any & ~two, 3), 12));
    return make(Category::HighCard, pack_bits(top_bits(any, 5), 16));
  }

  /// Validating entry point for 5..7 cards.
  HandRank evaluate(std::span<const Card> cards, const Deck& deck) const {
    if (cards.size() < 5 || cards.size() > 7)
      throw InvalidInput("hand must have 5 to 7 cards, got " + std::to_string(cards.size()));
    detail::check_hand(cards, deck);
    return evaluate(CardSet(cards));
  }

 private:
  const std::array<std::uint8_t, 8192>* straights_;
};

/// Best five of exactly seven cards.
inline HandRank rank7(std::span<const Card> cards, const Deck& deck = Deck::full()) {
  if (cards.size() != 7) throw InvalidInput("rank7 needs exactly 7 cards, got " + std::to_string(cards.size()));
  return HandEvaluator(deck).evaluate(cards, deck);
}

}  // namespace iseval
