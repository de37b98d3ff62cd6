#include <gtest/gtest.h>

#include "iseval/golden.hpp"

using namespace iseval;

TEST(GitBlobSha1, KnownIds) {
  // `git hash-object` of an empty file and of "hello\n".
  EXPECT_EQ(git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(GoldenTable, CsvRoundTrip) {
  const Deck deck(5);
  const auto table = GoldenTable::from_estimates(deck, exact_table(deck));
  const auto csv = table.to_csv();
  EXPECT_TRUE(csv.starts_with("hand,equity,exact,samples\n"));
  const auto back = GoldenTable::parse_csv(csv, deck);
  EXPECT_EQ(back.to_csv(), csv);
  EXPECT_TRUE(back.complete());
  EXPECT_EQ(back.content_sha1(), table.content_sha1());
}

TEST(GoldenTable, RejectsMalformedFiles) {
  EXPECT_THROW(GoldenTable::parse_csv("hand,equity\nAA,0.5\n"), ParseError);
  EXPECT_THROW(GoldenTable::parse_csv("hand,equity,exact,samples\nAA,0.5,yes,1\n"), ParseError);
  EXPECT_THROW(GoldenTable::parse_csv("hand,equity,exact,samples\nAA,1.5,true,1\n"), ParseError);
  EXPECT_THROW(GoldenTable::parse_csv("hand,equity,exact,samples\nAA,0.5x,true,1\n"), ParseError);
  EXPECT_THROW(GoldenTable::parse_csv("hand,equity,exact,samples\nAA,0.5,true,1\nAA,0.5,true,1\n"), ParseError);
  EXPECT_THROW(GoldenTable::parse_csv("hand,equity,exact,samples\nA1,0.5,true,1\n"), ParseError);
  EXPECT_THROW(GoldenTable::load("/nonexistent/golden.csv"), IoError);
}

TEST(GoldenTable, PartialTablesAreAllowed) {
  const auto t = GoldenTable::parse_csv("hand,equity,exact,samples\nAA,0.852037133,true,2097572400\n");
  EXPECT_FALSE(t.complete());
  EXPECT_TRUE(t.lookup(parse_hand_code("AA")).has_value());
  EXPECT_FALSE(t.lookup(parse_hand_code("KK")).has_value());
}

// Regression constants for the versioned full-deck table, produced by the
// exact whole-table enumeration. AA and 72o also agree with the widely
// published preflop figures (85.2% and 34.6%).
TEST(GoldenTable, VersionedFullDeckFile) {
  const auto t = GoldenTable::load(default_golden_path());
  EXPECT_TRUE(t.complete());
  const auto aa = *t.lookup(parse_hand_code("AA"));
  EXPECT_TRUE(aa.exact);
  EXPECT_EQ(aa.samples, 2097572400u);
  EXPECT_NEAR(aa.equity, 0.852037133, 1e-12);
  EXPECT_NEAR(t.lookup(parse_hand_code("72o"))->equity, 0.345836473, 1e-12);
  for (const auto& h : canonical_hands(Deck::full())) {
    const auto e = *t.lookup(h);
    EXPECT_GT(e.equity, 0.25) << h.code();
    EXPECT_LT(e.equity, 0.86) << h.code();
  }
}
