#pragma once

// Cards, decks and suit-isomorphism classes of two-card hole hands.
//
// Ranks are 0..12 for 2..A on every deck. A reduced deck keeps all four suits
// and drops the lowest ranks, so a card's rank value never depends on the deck
// it was dealt from.

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iseval/error.hpp"

namespace iseval {

inline constexpr int kNumRanks = 13;
inline constexpr int kNumSuits = 4;
inline constexpr std::string_view kRankChars = "23456789TJQKA";
inline constexpr std::string_view kSuitChars = "cdhs";

enum class Suit : std::uint8_t { Clubs = 0, Diamonds = 1, Hearts = 2, Spades = 3 };

struct Card {
  std::uint8_t rank = 0;  // 0 = deuce ... 12 = ace
  std::uint8_t suit = 0;

  constexpr Card() = default;
  constexpr Card(int r, int s) : rank(static_cast<std::uint8_t>(r)), suit(static_cast<std::uint8_t>(s)) {}
  constexpr Card(int r, Suit s) : Card(r, static_cast<int>(s)) {}

  /// Dense index, rank-major: 0 = 2c, 51 = As.
  constexpr int index() const noexcept { return rank * kNumSuits + suit; }
  static constexpr Card from_index(int i) noexcept { return Card(i / kNumSuits, i % kNumSuits); }

  /// Bit position inside a CardSet (16 bits per suit).
  constexpr int bit() const noexcept { return suit * 16 + rank; }

  friend constexpr auto operator<=>(const Card&, const Card&) = default;
};

/// A set of cards as a 64-bit mask, four 16-bit rank lanes (one per suit).
class CardSet {
 public:
  constexpr CardSet() = default;
  constexpr explicit CardSet(std::uint64_t bits) : bits_(bits) {}
  constexpr CardSet(std::initializer_list<Card> cards) {
    for (auto c : cards) add(c);
  }
  explicit CardSet(std::span<const Card> cards) {
    for (auto c : cards) add(c);
  }

  constexpr void add(Card c) noexcept { bits_ |= std::uint64_t{1} << c.bit(); }
  constexpr bool contains(Card c) const noexcept { return (bits_ >> c.bit()) & 1u; }
  constexpr int size() const noexcept { return std::popcount(bits_); }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr std::uint64_t bits() const noexcept { return bits_; }
  constexpr std::uint16_t suit_mask(int suit) const noexcept {
    return static_cast<std::uint16_t>(bits_ >> (16 * suit));
  }

  constexpr CardSet operator|(CardSet o) const noexcept { return CardSet(bits_ | o.bits_); }
  constexpr CardSet operator&(CardSet o) const noexcept { return CardSet(bits_ & o.bits_); }
  constexpr bool intersects(CardSet o) const noexcept { return (bits_ & o.bits_) != 0; }

  friend constexpr auto operator<=>(const CardSet&, const CardSet&) = default;

 private:
  std::uint64_t bits_ = 0;
};

using SuitPermutation = std::array<std::uint8_t, kNumSuits>;

/// All 24 permutations of the four suits, identity first.
inline const std::array<SuitPermutation, 24>& suit_permutations() {
  static const auto perms = [] {
    std::array<SuitPermutation, 24> out{};
    SuitPermutation p{0, 1, 2, 3};
    std::size_t i = 0;
    do {
      out[i++] = p;
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
  }();
  return perms;
}

constexpr Card permute(Card c, const SuitPermutation& p) noexcept { return Card(c.rank, p[c.suit]); }

constexpr CardSet permute(CardSet s, const SuitPermutation& p) noexcept {
  std::uint64_t out = 0;
  for (int suit = 0; suit < kNumSuits; ++suit)
    out |= std::uint64_t{s.suit_mask(suit)} << (16 * p[suit]);
  return CardSet(out);
}

class Deck {
 public:
  /// A deck with the `ranks` highest ranks in four suits; 13 gives the full deck.
  explicit Deck(int ranks = kNumRanks) : ranks_(ranks) {
    if (ranks < 5 || ranks > kNumRanks)
      throw InvalidInput("deck must have between 5 and 13 ranks, got " + std::to_string(ranks));
    cards_.reserve(static_cast<std::size_t>(ranks) * kNumSuits);
    for (int r = lowest_rank(); r < kNumRanks; ++r)
      for (int s = 0; s < kNumSuits; ++s) cards_.emplace_back(r, s);
  }

  static Deck full() { return Deck(kNumRanks); }

  /// "full" or "short:R".
  static Deck parse(std::string_view text) {
    if (text == "full") return full();
    if (text.starts_with("short:")) {
      const auto digits = text.substr(6);
      if (digits.empty() || digits.size() > 2 ||
          !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw ParseError("bad deck spec '" + std::string(text) + "', expected full or short:R");
      return Deck(std::stoi(std::string(digits)));
    }
    throw ParseError("bad deck spec '" + std::string(text) + "', expected full or short:R");
  }

  int ranks() const noexcept { return ranks_; }
  int lowest_rank() const noexcept { return kNumRanks - ranks_; }
  int size() const noexcept { return static_cast<int>(cards_.size()); }
  bool is_full() const noexcept { return ranks_ == kNumRanks; }
  const std::vector<Card>& cards() const& noexcept { return cards_; }
  std::vector<Card> cards() && noexcept { return std::move(cards_); }

  bool contains(Card c) const noexcept {
    return c.rank >= lowest_rank() && c.rank < kNumRanks && c.suit < kNumSuits;
  }

  CardSet all() const noexcept {
    const auto lane = static_cast<std::uint64_t>(((1u << kNumRanks) - 1) & ~((1u << lowest_rank()) - 1));
    return CardSet(lane | lane << 16 | lane << 32 | lane << 48);
  }

  std::string name() const { return is_full() ? "full" : "short:" + std::to_string(ranks_); }

  friend bool operator==(const Deck& a, const Deck& b) { return a.ranks_ == b.ranks_; }

 private:
  int ranks_;
  std::vector<Card> cards_;
};

inline Card parse_card(std::string_view text) {
  if (text.size() != 2) throw ParseError("card code must be 2 characters: '" + std::string(text) + "'");
  const auto r = kRankChars.find(text[0]);
  if (r == std::string_view::npos)
    throw ParseError(std::string("bad rank character '") + text[0] + "' in '" + std::string(text) + "'", text[0]);
  const auto s = kSuitChars.find(text[1]);
  if (s == std::string_view::npos)
    throw ParseError(std::string("bad suit character '") + text[1] + "' in '" + std::string(text) + "'", text[1]);
  return Card(static_cast<int>(r), static_cast<int>(s));
}

inline std::string format_card(Card c) { return {kRankChars[c.rank], kSuitChars[c.suit]}; }

/// Parses concatenated codes such as "AsKd". Duplicates are rejected.
inline std::vector<Card> parse_cards(std::string_view text) {
  if (text.size() % 2 != 0) throw ParseError("odd-length card list '" + std::string(text) + "'");
  std::vector<Card> out;
  CardSet seen;
  for (std::size_t i = 0; i < text.size(); i += 2) {
    const Card c = parse_card(text.substr(i, 2));
    if (seen.contains(c)) throw InvalidInput("duplicate card " + format_card(c));
    seen.add(c);
    out.push_back(c);
  }
  return out;
}

inline std::string format_cards(std::span<const Card> cards) {
  std::string out;
  for (auto c : cards) out += format_card(c);
  return out;
}

struct CanonicalHand {
  std::uint8_t high_rank = 0;
  std::uint8_t low_rank = 0;
  bool suited = false;

  bool is_pair() const noexcept { return high_rank == low_rank; }

  /// Number of concrete hole pairs in this class: 6, 4 or 12.
  int class_size() const noexcept { return is_pair() ? 6 : suited ? 4 : 12; }

  /// "AA", "AKs", "T9o".
  std::string code() const {
    std::string out{kRankChars[high_rank], kRankChars[low_rank]};
    if (!is_pair()) out += suited ? 's' : 'o';
    return out;
  }

  friend constexpr auto operator<=>(const CanonicalHand&, const CanonicalHand&) = default;
};

inline CanonicalHand canonicalize(Card a, Card b) {
  if (a == b) throw InvalidInput("duplicate card " + format_card(a) + " in hole hand");
  if (a.rank < b.rank) std::swap(a, b);
  return {a.rank, b.rank, a.rank != b.rank && a.suit == b.suit};
}

inline CanonicalHand canonicalize(std::pair<Card, Card> hole) { return canonicalize(hole.first, hole.second); }

inline CanonicalHand parse_hand_code(std::string_view text) {
  const auto bad = [&](char c) {
    return ParseError("bad hand code '" + std::string(text) + "', expected e.g. AA, AKs, T9o", c);
  };
  if (text.size() < 2 || text.size() > 3) throw bad('\0');
  const auto hi = kRankChars.find(text[0]);
  const auto lo = kRankChars.find(text[1]);
  if (hi == std::string_view::npos) throw bad(text[0]);
  if (lo == std::string_view::npos) throw bad(text[1]);
  CanonicalHand h{static_cast<std::uint8_t>(std::max(hi, lo)), static_cast<std::uint8_t>(std::min(hi, lo)), false};
  if (h.is_pair()) {
    if (text.size() != 2) throw bad(text[2]);
    return h;
  }
  if (text.size() != 3 || (text[2] != 's' && text[2] != 'o')) throw bad(text.size() == 3 ? text[2] : '\0');
  h.suited = text[2] == 's';
  return h;
}

/// Position of a class in the R x R grid of a deck: suited above the
/// diagonal, offsuit below, pairs on it. Indices run over [0, R*R).
inline int hand_index(const CanonicalHand& h, const Deck& deck) {
  const int lo = deck.lowest_rank();
  if (h.low_rank < lo) throw InvalidInput("hand " + h.code() + " is not in deck " + deck.name());
  const int hi_rel = h.high_rank - lo;
  const int lo_rel = h.low_rank - lo;
  return h.suited ? hi_rel * deck.ranks() + lo_rel : lo_rel * deck.ranks() + hi_rel;
}

inline CanonicalHand hand_from_index(int index, const Deck& deck) {
  const int n = deck.ranks();
  if (index < 0 || index >= n * n) throw InvalidInput("hand index out of range: " + std::to_string(index));
  const int a = index / n + deck.lowest_rank();
  const int b = index % n + deck.lowest_rank();
  if (a > b) return {static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b), true};
  return {static_cast<std::uint8_t>(b), static_cast<std::uint8_t>(a), false};
}

inline int canonical_hand_count(const Deck& deck) { return deck.ranks() * deck.ranks(); }

/// Every class of the deck, in hand_index order.
inline std::vector<CanonicalHand> canonical_hands(const Deck& deck) {
  std::vector<CanonicalHand> out;
  out.reserve(static_cast<std::size_t>(canonical_hand_count(deck)));
  for (int i = 0; i < canonical_hand_count(deck); ++i) out.push_back(hand_from_index(i, deck));
  return out;
}

/// Fixed member of a class: suits (spades, hearts) for pairs and offsuit,
/// spades for suited.
inline std::pair<Card, Card> representative_hole(const CanonicalHand& h) {
  if (h.suited) return {Card(h.high_rank, Suit::Spades), Card(h.low_rank, Suit::Spades)};
  return {Card(h.high_rank, Suit::Spades), Card(h.low_rank, Suit::Hearts)};
}

/// All concrete hole pairs of a class (high card first).
inline std::vector<std::pair<Card, Card>> holes_of(const CanonicalHand& h) {
  std::vector<std::pair<Card, Card>> out;
  for (int s1 = 0; s1 < kNumSuits; ++s1)
    for (int s2 = 0; s2 < kNumSuits; ++s2) {
      if (h.is_pair() && s2 <= s1) continue;
      if (!h.is_pair() && (s1 == s2) != h.suited) continue;
      out.emplace_back(Card(h.high_rank, s1), Card(h.low_rank, s2));
    }
  return out;
}

}  // namespace iseval
