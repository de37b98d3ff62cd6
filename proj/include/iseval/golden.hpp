#pragma once

// Ground-truth equity table: one row per canonical class, stored as CSV
// `hand,equity,exact,samples` and identified by its git blob SHA-1.

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "iseval/cards.hpp"
#include "iseval/equity.hpp"
#include "iseval/error.hpp"

namespace iseval {

/// SHA-1 of "blob <size>\0<content>", the id git gives the same bytes.
inline std::string git_blob_sha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for " + path);
}

inline std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct GoldenEntry {
  CanonicalHand hand;
  double equity = 0;
  bool exact = false;
  std::uint64_t samples = 0;
};

class GoldenTable {
 public:
  explicit GoldenTable(Deck deck = Deck::full())
      : deck_(std::move(deck)), entries_(static_cast<std::size_t>(canonical_hand_count(deck_))) {}

  /// Table from estimates indexed by hand_index (as returned by exact_table).
  static GoldenTable from_estimates(const Deck& deck, const std::vector<EquityEstimate>& estimates) {
    GoldenTable t(deck);
    if (estimates.size() != t.entries_.size()) throw InvalidInput("need one estimate per canonical hand");
    for (std::size_t i = 0; i < estimates.size(); ++i) {
      const auto& e = estimates[i];
      t.set({hand_from_index(static_cast<int>(i), deck), e.mean, e.exact, e.samples_used});
    }
    return t;
  }

  const Deck& deck() const noexcept { return deck_; }

  void set(const GoldenEntry& e) { entries_[static_cast<std::size_t>(hand_index(e.hand, deck_))] = e; }

  std::optional<GoldenEntry> lookup(const CanonicalHand& h) const {
    return entries_[static_cast<std::size_t>(hand_index(h, deck_))];
  }

  bool complete() const {
    for (const auto& e : entries_)
      if (!e) return false;
    return true;
  }

  /// Rows in hand_index order; equity with 9 decimals.
  std::string to_csv() const {
    std::string out = "hand,equity,exact,samples\n";
    for (const auto& e : entries_) {
      if (!e) continue;
      out += e->hand.code() + ',' + format_fixed(e->equity, 9) + ',' + (e->exact ? "true" : "false") + ',' +
             std::to_string(e->samples) + '\n';
    }
    return out;
  }

  static GoldenTable parse_csv(std::string_view text, const Deck& deck = Deck::full()) {
    GoldenTable t(deck);
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != "hand,equity,exact,samples")
      throw ParseError("golden table must start with header hand,equity,exact,samples");
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::istringstream row(line);
      std::string hand, equity, exact, samples;
      if (!std::getline(row, hand, ',') || !std::getline(row, equity, ',') || !std::getline(row, exact, ',') ||
          !std::getline(row, samples))
        throw ParseError("golden table line " + std::to_string(lineno) + ": expected 4 fields");
      GoldenEntry e;
      e.hand = parse_hand_code(hand);
      try {
        std::size_t used = 0;
        e.equity = std::stod(equity, &used);
        if (used != equity.size()) throw std::invalid_argument(equity);
        e.samples = std::stoull(samples, &used);
        if (used != samples.size()) throw std::invalid_argument(samples);
      } catch (const std::logic_error&) {
        throw ParseError("golden table line " + std::to_string(lineno) + ": bad number");
      }
      if (e.equity < 0 || e.equity > 1)
        throw ParseError("golden table line " + std::to_string(lineno) + ": equity outside [0,1]");
      if (exact != "true" && exact != "false")
        throw ParseError("golden table line " + std::to_string(lineno) + ": exact must be true or false");
      e.exact = exact == "true";
      if (t.lookup(e.hand)) throw ParseError("golden table line " + std::to_string(lineno) + ": duplicate " + hand);
      t.set(e);
    }
    return t;
  }

  static GoldenTable load(const std::string& path, const Deck& deck = Deck::full()) {
    return parse_csv(read_file(path), deck);
  }

  void save(const std::string& path) const { write_file(path, to_csv()); }

  std::string content_sha1() const { return git_blob_sha1(to_csv()); }

 private:
  Deck deck_;
  std::vector<std::optional<GoldenEntry>> entries_;
};

/// Default location of the versioned full-deck table.
inline std::string default_golden_path() {
#ifdef ISEVAL_GOLDEN_TABLE
  return ISEVAL_GOLDEN_TABLE;
#else
  return "data/golden_equity_full.csv";
#endif
}

}  // namespace iseval
