#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "iseval/equity.hpp"
#include "oracles.hpp"

using namespace iseval;

namespace {

Showdown make_showdown(std::string_view hero, std::string_view villain, std::string_view board) {
  Showdown s{};
  const auto h = parse_cards(hero), v = parse_cards(villain), b = parse_cards(board);
  std::copy(h.begin(), h.end(), s.hero_hole.begin());
  std::copy(v.begin(), v.end(), s.villain_hole.begin());
  std::copy(b.begin(), b.end(), s.board.begin());
  return s;
}

}  // namespace

TEST(Showdown, AcesBeatKings) {
  const auto s = make_showdown("AsAh", "KsKh", "2d7c9sJd3c");
  // Subset oracle: pair of aces vs pair of kings on the same board.
  std::array<Card, 7> hero{}, villain{};
  std::copy(s.hero_hole.begin(), s.hero_hole.end(), hero.begin());
  std::copy(s.board.begin(), s.board.end(), hero.begin() + 2);
  std::copy(s.villain_hole.begin(), s.villain_hole.end(), villain.begin());
  std::copy(s.board.begin(), s.board.end(), villain.begin() + 2);
  ASSERT_GT(oracle::best_of_21(hero), oracle::best_of_21(villain));
  EXPECT_EQ(showdown_value(s), Outcome::win());
  EXPECT_EQ(showdown_value(s).value(), 1.0);
}

TEST(Showdown, MirroredHandsTie) {
  EXPECT_EQ(showdown_value(make_showdown("AsKd", "AcKh", "2d7c9sJd3c")).value(), 0.5);
}

TEST(Showdown, SwapComplements) {
  CounterRng rng(3, 3);
  const Deck deck;
  const HandEvaluator eval;
  for (int t = 0; t < 2000; ++t) {
    const CardSet hero{Card(rng.below(13), 0), Card(rng.below(13), 1)};
    const auto c = sample_completion(hero, deck.cards(), rng);
    const Outcome fwd = Outcome::compare(eval.evaluate(hero | c.board), eval.evaluate(c.villain | c.board));
    const Outcome back = Outcome::compare(eval.evaluate(c.villain | c.board), eval.evaluate(hero | c.board));
    ASSERT_EQ(fwd.complement(), back);
  }
}

TEST(Showdown, CollisionRejected) {
  EXPECT_THROW(showdown_value(make_showdown("AsAh", "AsKh", "2d7c9sJd3c")), InvalidInput);
  EXPECT_THROW(showdown_value(make_showdown("AsAh", "KsKh", "2d7c9sJdAh")), InvalidInput);
}

TEST(InformationSet, FullDeckSize) {
  EXPECT_EQ(information_set_size(Deck::full()), 1225ull * 1712304ull);
  // Total over all 1326 holes matches the published combination count.
  EXPECT_EQ(1326ull * information_set_size(Deck::full()), 2781381002400ull);
}

class ExactEquityDeck : public ::testing::TestWithParam<int> {};

// Optimized routes against the naive double loop, every class of the deck.
TEST_P(ExactEquityDeck, MatchesNaiveEnumeration) {
  const Deck deck(GetParam());
  const auto table = exact_table(deck);
  const auto hands = canonical_hands(deck);
  ASSERT_EQ(table.size(), hands.size());
  for (std::size_t i = 0; i < hands.size(); ++i) {
    const auto [h1, h2] = representative_hole(hands[i]);
    const auto naive = oracle::naive_exact_equity(h1, h2, deck);
    ASSERT_EQ(naive.completions, information_set_size(deck));
    // Antisymmetry: villain aggregate is the complement of the hero's.
    EXPECT_EQ(naive.hero_half_points + naive.villain_half_points, 2 * naive.completions);

    const auto per_hand = exact_equity(hands[i], deck);
    EXPECT_EQ(per_hand.half_points, naive.hero_half_points) << hands[i].code();
    EXPECT_EQ(table[i].half_points, naive.hero_half_points) << hands[i].code();
    EXPECT_TRUE(per_hand.exact);
    EXPECT_EQ(per_hand.samples_used, information_set_size(deck));
    EXPECT_DOUBLE_EQ(per_hand.mean, static_cast<double>(naive.hero_half_points) / (2.0 * naive.completions));
  }
}

INSTANTIATE_TEST_SUITE_P(ReducedDecks, ExactEquityDeck, ::testing::Values(5, 6));

TEST(ExactEquity, EveryHoleOfAClassAgrees) {
  const Deck deck(5);
  for (const auto& hand : canonical_hands(deck)) {
    const auto [r1, r2] = representative_hole(hand);
    const auto ref = oracle::naive_exact_equity(r1, r2, deck).hero_half_points;
    for (auto [a, b] : holes_of(hand)) EXPECT_EQ(oracle::naive_exact_equity(a, b, deck).hero_half_points, ref);
  }
}

TEST(ExactEquity, WorkerCountDoesNotChangeResult) {
  const Deck deck(6);
  const auto one = exact_table(deck, 1);
  const auto four = exact_table(deck, 4);
  for (std::size_t i = 0; i < one.size(); ++i) EXPECT_EQ(one[i].half_points, four[i].half_points);
  const auto hand = parse_hand_code("AKo");
  EXPECT_EQ(exact_equity(hand, deck, 1).half_points, exact_equity(hand, deck, 3).half_points);
}

TEST(ExactEquity, DeckTooSmall) {
  // The smallest deck has 20 cards, so build the error through a hand outside the deck.
  EXPECT_THROW(exact_equity(parse_hand_code("22"), Deck(5)), InvalidInput);
}

TEST(McEquity, SingleSampleIsAnOutcome) {
  const Deck deck;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto e = mc_equity(parse_hand_code("AA"), 1, deck, seed);
    EXPECT_TRUE(e.mean == 0.0 || e.mean == 0.5 || e.mean == 1.0) << e.mean;
    EXPECT_FALSE(e.exact);
    EXPECT_EQ(e.samples_used, 1u);
  }
}

TEST(McEquity, SeededRepeatIsIdentical) {
  const auto a = mc_equity(parse_hand_code("T9s"), 1000, Deck::full(), 7);
  const auto b = mc_equity(parse_hand_code("T9s"), 1000, Deck::full(), 7);
  EXPECT_EQ(a.half_points, b.half_points);
  const auto c = mc_equity(parse_hand_code("T9s"), 1000, Deck::full(), 8);
  EXPECT_NE(a.half_points, c.half_points);
  EXPECT_THROW(mc_equity(parse_hand_code("T9s"), 0, Deck::full(), 7), InvalidInput);
}

TEST(McEquity, ErrorShrinksLikeInverseSqrtK) {
  const Deck deck(6);
  const auto hand = parse_hand_code("KQs");
  const double exact = exact_equity(hand, deck).mean;
  for (std::uint64_t k : {10000ull, 1000000ull}) {
    const auto e = mc_equity(hand, k, deck, 11);
    // sd of one outcome is at most 0.5.
    EXPECT_LT(std::abs(e.mean - exact), 4 * 0.5 / std::sqrt(static_cast<double>(k))) << k;
  }
}

TEST(ErrorProfile, SingleSampleErrorsTakeThreeValues) {
  const Deck deck(5);
  const std::vector<CanonicalHand> hands = {parse_hand_code("AA"), parse_hand_code("KTo"), parse_hand_code("QJs")};
  std::vector<double> truths;
  for (const auto& h : hands) truths.push_back(exact_equity(h, deck).mean);
  const std::vector<std::uint64_t> ks = {1};
  const auto rows = error_profile(hands, truths, ks, 5000, deck, 1);
  ASSERT_EQ(rows.size(), 1u);
  for (const auto& cell : rows[0].cells) {
    const double p = cell.truth;
    for (std::size_t hp = 0; hp < cell.counts.size(); ++hp) {
      if (cell.counts[hp] == 0) continue;
      const double err = std::abs(cell.estimate(hp) - p);
      EXPECT_TRUE(err == p || err == std::abs(p - 0.5) || err == 1 - p) << err;
    }
  }
}

TEST(ErrorProfile, MeanAbsErrorFallsWithK) {
  const Deck deck(5);
  const std::vector<CanonicalHand> hands = {parse_hand_code("AA"), parse_hand_code("KTo")};
  std::vector<double> truths;
  for (const auto& h : hands) truths.push_back(exact_equity(h, deck).mean);
  const std::vector<std::uint64_t> ks = {1, 4, 16, 64};
  const auto rows = error_profile(hands, truths, ks, 4000, deck, 2);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].mean_abs_error, rows[i - 1].mean_abs_error);
  std::uint64_t in_hist = 0;
  for (auto c : rows[0].error_histogram) in_hist += c;
  EXPECT_EQ(in_hist, 8000u);
}

TEST(ErrorProfile, WorkerCountDoesNotChangeCounts) {
  const Deck deck(6);
  const std::vector<CanonicalHand> hands = {parse_hand_code("AJo")};
  const std::vector<double> truths = {0.5};
  const std::vector<std::uint64_t> ks = {3};
  const auto a = error_profile(hands, truths, ks, 3000, deck, 9, 1);
  const auto b = error_profile(hands, truths, ks, 3000, deck, 9, 3);
  EXPECT_EQ(a[0].cells[0].counts, b[0].cells[0].counts);
}
