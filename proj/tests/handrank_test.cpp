#include <gtest/gtest.h>

#include <array>
#include <map>

#include "iseval/handrank.hpp"
#include "iseval/rng.hpp"
#include "oracles.hpp"

using namespace iseval;

namespace {

std::array<Card, 5> five(std::string_view codes) {
  const auto v = parse_cards(codes);
  std::array<Card, 5> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

std::array<Card, 7> seven(std::string_view codes) {
  const auto v = parse_cards(codes);
  std::array<Card, 7> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

}  // namespace

TEST(Rank5, RoyalFlush) {
  const auto r = rank5(five("AsKsQsJsTs"));
  EXPECT_EQ(r.category(), Category::StraightFlush);
  EXPECT_EQ(r.tiebreak(), std::vector<int>{12});
  EXPECT_EQ(r.to_string(), "StraightFlush [A]");
}

TEST(Rank5, WheelIsFiveHigh) {
  const auto r = rank5(five("As2d3c4h5s"));
  EXPECT_EQ(r.category(), Category::Straight);
  EXPECT_EQ(r.tiebreak(), std::vector<int>{3});
  EXPECT_LT(r, rank5(five("2d3c4h5s6s")));
}

TEST(Rank5, Duplicates) {
  EXPECT_THROW(rank5(five("AsAsQsJsTs")), InvalidInput);
  EXPECT_THROW(rank5(parse_cards("AsKs")), InvalidInput);
}

TEST(Rank5, Ordering) {
  EXPECT_LT(rank5(five("AsAdKcKh2s")), rank5(five("2s2d2c3h4s")));
  EXPECT_LT(rank5(five("KsKdQcQhAs")), rank5(five("AsAdQcQh2s")));
  EXPECT_EQ(rank5(five("AsKdQcJh9s")), rank5(five("AhKsQdJc9h")));
  EXPECT_LT(rank5(five("AsKdQcJh9s")), rank5(five("AsKdQcJhTd")));
}

// Category counts over all C(52,5) hands, cross-checked against the
// independent naive classifier before being compared to the known constants.
TEST(Rank5, FullDeckCategoryCounts) {
  const auto cards = Deck::full().cards();
  std::array<long, 9> fast{}, naive{};
  std::array<Card, 5> h{};
  long total = 0;
  for (int a = 0; a < 52; ++a)
    for (int b = a + 1; b < 52; ++b)
      for (int c = b + 1; c < 52; ++c)
        for (int d = c + 1; d < 52; ++d)
          for (int e = d + 1; e < 52; ++e) {
            h = {cards[a], cards[b], cards[c], cards[d], cards[e]};
            const auto cat = rank5(h).category();
            ++fast[static_cast<std::size_t>(cat)];
            ++naive[static_cast<std::size_t>(oracle::naive_category(h))];
            ++total;
          }
  EXPECT_EQ(total, 2598960);
  EXPECT_EQ(fast, naive);
  const std::array<long, 9> expected = {1302540, 1098240, 123552, 54912, 10200, 5108, 3744, 624, 40};
  EXPECT_EQ(fast, expected);
}

TEST(Rank5, ReducedDeckMatchesNaiveClassifier) {
  for (int ranks : {5, 6, 8}) {
    const Deck deck(ranks);
    const auto& cards = deck.cards();
    const int n = deck.size();
    std::array<Card, 5> h{};
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = b + 1; c < n; ++c)
          for (int d = c + 1; d < n; ++d)
            for (int e = d + 1; e < n; ++e) {
              h = {cards[a], cards[b], cards[c], cards[d], cards[e]};
              ASSERT_EQ(rank5(h, deck).category(), oracle::naive_category(h, deck.lowest_rank()))
                  << format_cards(h);
            }
  }
}

TEST(Rank5, ReducedDeckAceLowStraight) {
  const Deck deck(6);  // 9..A
  const auto r = rank5(five("As9dTcJhQs"), deck);
  EXPECT_EQ(r.category(), Category::Straight);
  EXPECT_EQ(r.to_string(), "Straight [Q]");
  EXPECT_THROW(rank5(five("As2d3c4h5s"), deck), InvalidInput);
}

TEST(Rank7, ContainsRoyalFlush) {
  EXPECT_EQ(rank7(seven("2d7cAsKsQsJsTs")).to_string(), "StraightFlush [A]");
}

TEST(Rank7, BestFullHouse) {
  const auto r = rank7(seven("AsAdKcKhKd2s3d"));
  EXPECT_EQ(r.category(), Category::FullHouse);
  EXPECT_EQ(r.tiebreak(), (std::vector<int>{11, 12}));
}

TEST(Rank7, Errors) {
  EXPECT_THROW(rank7(parse_cards("AsKsQsJsTs")), InvalidInput);
  EXPECT_THROW(rank7(seven("AsAsKcKhKd2s3d")), InvalidInput);
}

TEST(Rank7, MatchesSubsetOracleOnSeededDraws) {
  CounterRng rng(20240601, 0);
  const auto deck = Deck::full().cards();
  for (int t = 0; t < 100000; ++t) {
    std::array<Card, 7> h{};
    CardSet used;
    for (auto& c : h) {
      do c = deck[rng.below(52)];
      while (used.contains(c));
      used.add(c);
    }
    ASSERT_EQ(rank7(h), oracle::best_of_21(h)) << format_cards(h);
  }
}

TEST(Rank7, ExhaustiveOnReducedDeck) {
  const Deck deck(6);
  const HandEvaluator eval(deck);
  const auto& cards = deck.cards();
  const int n = deck.size();
  long checked = 0;
  std::array<int, 7> idx{0, 1, 2, 3, 4, 5, 6};
  while (true) {
    std::array<Card, 7> h{};
    for (int i = 0; i < 7; ++i) h[static_cast<std::size_t>(i)] = cards[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    ASSERT_EQ(eval.evaluate(CardSet(h)), oracle::best_of_21(h, deck)) << format_cards(h);
    ++checked;
    int i = 6;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - 7 + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < 7; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  EXPECT_EQ(checked, 346104);
}

TEST(Rank7, PermutationInvariant) {
  CounterRng rng(5, 5);
  auto h = seven("AsAdKcKhKd2s3d");
  const auto base = rank7(h);
  for (int t = 0; t < 50; ++t) {
    for (std::size_t i = h.size() - 1; i > 0; --i) std::swap(h[i], h[rng.below(i + 1)]);
    EXPECT_EQ(rank7(h), base);
  }
}

TEST(HandEvaluator, AgreesWithRank5OnFiveCards) {
  CounterRng rng(77, 0);
  const HandEvaluator eval;
  const auto deck = Deck::full().cards();
  for (int t = 0; t < 50000; ++t) {
    std::array<Card, 5> h{};
    CardSet used;
    for (auto& c : h) {
      do c = deck[rng.below(52)];
      while (used.contains(c));
      used.add(c);
    }
    ASSERT_EQ(eval.evaluate(used), rank5(h)) << format_cards(h);
  }
}
