// iseval: command-line front end for hand ranking, equity, datasets,
// training and the budget sweep.
//
// Exit codes: 0 success, 1 check failed (gradcheck), 2 usage or input error,
// 3 partial result, 4 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "iseval/cards.hpp"
#include "iseval/equity.hpp"
#include "iseval/error.hpp"
#include "iseval/golden.hpp"
#include "iseval/handrank.hpp"
#include "iseval/infoset.hpp"
#include "iseval/parallel.hpp"
#include "iseval/regressor.hpp"
#include "iseval/sweep.hpp"

#include <json.hpp>

namespace fs = std::filesystem;
using namespace iseval;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kPartial = 3;
constexpr int kIo = 4;

std::string default_out_dir() {
  const char* env = std::getenv("ISEVAL_OUT_DIR");
  return env && *env ? env : ".";
}

std::string out_path(const std::string& explicit_path, const std::string& file_name) {
  return explicit_path.empty() ? (fs::path(default_out_dir()) / file_name).string() : explicit_path;
}

void print_config(const std::string& command, Json config) {
  Json j;
  j["command"] = command;
  for (auto& [k, v] : config.items()) j[k] = v;
  std::cout << "config: " << j.dump() << '\n';
}

std::vector<std::uint64_t> parse_u64_list(const std::string& csv, const std::string& what) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw InvalidInput("bad " + what + " list '" + csv + "'");
    out.push_back(std::stoull(item));
  }
  if (out.empty()) throw InvalidInput("empty " + what + " list");
  return out;
}

std::string join(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (auto x : v) out += (out.empty() ? "" : ",") + std::to_string(x);
  return out;
}

std::shared_ptr<const GoldenTable> load_golden(const std::string& path, const Deck& deck) {
  if (!fs::exists(path))
    throw NoGroundTruth("golden table not found at " + path + "; generate it with `iseval table --mode exact --deck " +
                        deck.name() + " --out " + path + "`");
  auto t = std::make_shared<const GoldenTable>(GoldenTable::load(path, deck));
  if (!t->complete()) throw NoGroundTruth("golden table " + path + " does not cover every canonical hand");
  return t;
}

std::string golden_file_name(const Deck& deck) {
  return deck.is_full() ? "golden_equity_full.csv" : "golden_equity_short" + std::to_string(deck.ranks()) + ".csv";
}

std::string golden_default_for(const Deck& deck) {
  return deck.is_full() ? default_golden_path()
                        : (fs::path(default_out_dir()) / golden_file_name(deck)).string();
}

struct TrainFlags {
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::string optimizer = "adam";
  std::uint64_t max_updates = 20000;
  std::uint64_t max_epochs = 0;
  std::uint64_t eval_every = 100;
  std::uint64_t patience = 20;
  std::string hidden = "64,64";

  void add(CLI::App* cmd) {
    cmd->add_option("--batch", batch_size, "Mini-batch size")->capture_default_str();
    cmd->add_option("--lr", learning_rate, "Learning rate")->capture_default_str();
    cmd->add_option("--optimizer", optimizer, "adam or sgd")->capture_default_str();
    cmd->add_option("--max-updates", max_updates, "Update cap")->capture_default_str();
    cmd->add_option("--max-epochs", max_epochs, "Pass cap, 0 = none")->capture_default_str();
    cmd->add_option("--eval-every", eval_every, "Validation cadence in updates")->capture_default_str();
    cmd->add_option("--patience", patience, "Checks without improvement before stopping, 0 = off")
        ->capture_default_str();
    cmd->add_option("--hidden", hidden, "Hidden layer sizes, comma separated")->capture_default_str();
  }

  TrainConfig resolve(std::uint64_t seed) const {
    TrainConfig c;
    c.batch_size = batch_size;
    c.learning_rate = learning_rate;
    c.optimizer = parse_optimizer(optimizer);
    c.max_updates = max_updates;
    c.max_epochs = max_epochs;
    c.eval_every = eval_every;
    c.patience = patience;
    c.seed = seed;
    c.hidden.clear();
    for (auto h : parse_u64_list(hidden, "hidden size")) c.hidden.push_back(static_cast<std::size_t>(h));
    c.validate();
    return c;
  }
};

// --- commands --------------------------------------------------------------

struct RankCmd {
  std::string cards;
  std::string deck = "full";

  int run() {
    const Deck d = Deck::parse(deck);
    print_config("rank", {{"cards", cards}, {"deck", d.name()}});
    const auto cs = parse_cards(cards);
    HandRank r;
    if (cs.size() == 5)
      r = rank5(cs, d);
    else if (cs.size() == 7)
      r = rank7(cs, d);
    else
      throw InvalidInput("rank needs 5 or 7 cards, got " + std::to_string(cs.size()));
    std::cout << r.to_string() << '\n';
    return kOk;
  }
};

struct EquityCmd {
  std::string hand;
  std::string mode = "mc";
  std::uint64_t k = 1;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::string deck = "full";
  bool confirm_long = false;
  unsigned workers = default_workers();

  int run() {
    const Deck d = Deck::parse(deck);
    const auto h = parse_hand_code(hand);
    hand_index(h, d);
    if (mode == "exact") {
      print_config("equity", {{"hand", h.code()}, {"mode", mode}, {"deck", d.name()}, {"workers", workers}});
      const auto showdowns = information_set_size(d);
      if (d.is_full() && !confirm_long) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2g", static_cast<double>(showdowns));
        throw InvalidInput("exact equity on the full deck enumerates " + std::to_string(showdowns) + " (~" + buf +
                           ") showdowns; pass --confirm-long to run it");
      }
      print(exact_equity(h, d, workers));
      return kOk;
    }
    if (mode != "mc") throw InvalidInput("unknown mode '" + mode + "', expected exact or mc");
    print_config("equity", {{"hand", h.code()}, {"mode", mode}, {"k", k}, {"seed", seed}, {"trial", trial},
                            {"deck", d.name()}});
    print(mc_equity(h, k, d, seed, trial));
    return kOk;
  }

  static void print(const EquityEstimate& e) {
    std::cout << "mean=" << format_fixed(e.mean, 9) << " samples_used=" << e.samples_used
              << " exact=" << (e.exact ? "true" : "false") << '\n';
  }
};

struct McCmd {
  std::string hand;
  std::uint64_t k = 1;
  std::uint64_t trials = 10;
  std::uint64_t seed = 0;
  std::string deck = "full";
  std::string out;
  unsigned workers = default_workers();

  int run() {
    const Deck d = Deck::parse(deck);
    const auto h = parse_hand_code(hand);
    hand_index(h, d);
    if (k < 1 || trials < 1) throw InvalidInput("k and trials must be at least 1");
    print_config("mc", {{"hand", h.code()}, {"k", k}, {"trials", trials}, {"seed", seed}, {"deck", d.name()},
                        {"out", out}, {"workers", workers}});
    std::vector<EquityEstimate> est(trials);
    parallel_for(trials, workers, [&](std::size_t t) { est[t] = mc_equity(h, k, d, seed, t); });
    std::string csv = "trial,estimate,samples_used\n";
    double sum = 0;
    for (std::size_t t = 0; t < est.size(); ++t) {
      csv += std::to_string(t) + ',' + format_fixed(est[t].mean, 9) + ',' + std::to_string(est[t].samples_used) + '\n';
      sum += est[t].mean;
    }
    if (!out.empty()) write_file(out, csv);
    else std::cout << csv;
    std::cout << "mean_of_trials=" << format_fixed(sum / static_cast<double>(trials), 9) << '\n';
    return kOk;
  }
};

struct TableCmd {
  std::string mode = "exact";
  std::uint64_t samples = 10'000'000;
  std::uint64_t seed = 0;
  std::string deck = "full";
  std::string out;
  unsigned workers = default_workers();

  int run() {
    const Deck d = Deck::parse(deck);
    const std::string path = out_path(out, golden_file_name(d));
    Json cfg{{"mode", mode}, {"deck", d.name()}, {"out", path}, {"workers", workers}};
    if (mode == "mc") {
      cfg["samples"] = samples;
      cfg["seed"] = seed;
    } else if (mode != "exact") {
      throw InvalidInput("unknown mode '" + mode + "', expected exact or mc");
    }
    print_config("table", cfg);

    std::vector<EquityEstimate> est;
    if (mode == "exact") {
      est = exact_table(d, workers);
    } else {
      if (samples < 1) throw InvalidInput("samples must be at least 1");
      const auto hands = canonical_hands(d);
      est.resize(hands.size());
      parallel_for(hands.size(), workers, [&](std::size_t i) { est[i] = mc_equity(hands[i], samples, d, seed); });
    }
    const auto table = GoldenTable::from_estimates(d, est);
    table.save(path);

    std::uint64_t showdowns = 0;
    for (const auto& e : est) showdowns += e.samples_used;
    Json prov;
    prov["file"] = fs::path(path).filename().string();
    prov["sha1"] = table.content_sha1();
    prov["deck"] = d.name();
    prov["mode"] = mode;
    if (mode == "mc") {
      prov["samples_per_hand"] = samples;
      prov["seed"] = seed;
    }
    prov["hands"] = est.size();
    prov["showdowns_per_hand"] = mode == "exact" ? information_set_size(d) : samples;
    prov["enumeration"] = mode == "exact" ? "boards up to suit symmetry, every villain hole per board" : "uniform completions";
    std::string meta = path;
    if (meta.ends_with(".csv")) meta.resize(meta.size() - 4);
    write_file(meta + ".json", prov.dump(2) + '\n');
    std::cout << "wrote " << path << " sha1=" << prov["sha1"].get<std::string>() << '\n';
    return kOk;
  }
};

struct GenCmd {
  std::uint64_t budget = 2'000'000;
  std::uint64_t k = 1;
  std::uint64_t seed = 0;
  std::string deck = "full";
  std::string table;
  std::string out;
  unsigned workers = default_workers();

  int run() {
    const Deck d = Deck::parse(deck);
    const std::string path = out_path(out, "dataset_k" + std::to_string(k) + "_seed" + std::to_string(seed) + ".csv");
    const std::string tpath = table.empty() ? golden_default_for(d) : table;
    print_config("gen", {{"budget", budget}, {"k", k}, {"seed", seed}, {"deck", d.name()}, {"table", tpath},
                         {"out", path}, {"workers", workers}});
    std::string sha;
    if (fs::exists(tpath)) sha = GoldenTable::load(tpath, d).content_sha1();
    const PokerProvider p(d);
    const auto ds = generate_dataset(p, BudgetPlan(budget, k), seed, workers);
    save_dataset(ds, path, sha);
    std::cout << "wrote " << path << " n=" << ds.examples.size() << " evaluations=" << ds.evaluations << '\n';
    return kOk;
  }
};

struct TrainCmd {
  std::string data;
  std::uint64_t budget = 2'000'000;
  std::uint64_t k = 1;
  std::uint64_t seed = 0;
  std::string deck = "full";
  std::string table;
  std::string encoding = "onehot";
  std::string out;
  unsigned workers = default_workers();
  TrainFlags flags;

  int run() {
    const Deck d = Deck::parse(deck);
    const std::string tpath = table.empty() ? golden_default_for(d) : table;
    const std::string dir = out.empty() ? default_out_dir() : out;
    const TrainConfig cfg = flags.resolve(seed);
    Json j{{"data", data}, {"deck", d.name()}, {"table", tpath}, {"encoding", encoding}, {"out", dir}};
    if (data.empty()) {
      j["budget"] = budget;
      j["k"] = k;
    }
    j["seed"] = seed;
    j["train"] = cfg.to_json();
    print_config("train", j);

    const PokerProvider p(d, load_golden(tpath, d));
    const Dataset ds = data.empty() ? generate_dataset(p, BudgetPlan(budget, k), seed, workers) : load_dataset(data);
    if (!data.empty() && ds.provider_id != p.id())
      throw InvalidInput("dataset provider " + ds.provider_id + " does not match " + p.id());
    const auto features = make_features(p, encoding);
    const auto result = train(Mlp::random(layer_sizes(features.width(), cfg), seed), make_training_set(ds, features),
                              make_validation_set(p, features), cfg);

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
    write_file((fs::path(dir) / "trajectory.csv").string(), trajectory_to_csv(result.trajectory));
    save_checkpoint((fs::path(dir) / "model.bin").string(), {result.best, cfg, seed});
    const auto& b = result.best_point();
    std::cout << "n=" << ds.examples.size() << " updates=" << result.updates << " stop=" << to_string(result.stop)
              << " best_mae=" << format_double(b.mae) << " best_mse=" << format_double(b.mse)
              << " best_mae_weighted=" << format_double(b.mae_weighted) << " at_update=" << b.updates << '\n';
    return kOk;
  }
};

struct SweepCmd {
  std::uint64_t budget = 2'000'000;
  std::string ks = join(default_sweep_ks());
  std::string seeds = "0,1,2,3,4";
  std::uint64_t update_axis_updates = SweepConfig{}.update_axis_updates;
  std::uint64_t evalaxis_epochs = SweepConfig{}.evalaxis_epochs;
  std::string encoding = "onehot";
  std::string deck = "full";
  std::string table;
  std::string out;
  bool wallclock = false;
  unsigned workers = default_workers();
  TrainFlags flags = [] {
    TrainFlags f;
    const auto d = default_sweep_train_config();
    f.max_updates = d.max_updates;
    f.eval_every = d.eval_every;
    f.patience = d.patience;
    return f;
  }();

  int run() {
    const Deck d = Deck::parse(deck);
    const std::string tpath = table.empty() ? golden_default_for(d) : table;
    const std::string dir = out.empty() ? (fs::path(default_out_dir()) / "sweep").string() : out;
    SweepConfig c;
    c.ks = parse_u64_list(ks, "k");
    c.seeds = parse_u64_list(seeds, "seed");
    c.budget = budget;
    c.update_axis_updates = update_axis_updates;
    c.evalaxis_epochs = evalaxis_epochs;
    c.encoding = encoding;
    c.train = flags.resolve(0);
    c.workers = workers;
    c.record_wallclock = wallclock;
    c.update_axis_updates = c.update_axis();
    c.validate();
    Json j = c.to_json();
    j["deck"] = d.name();
    j["table"] = tpath;
    j["out"] = dir;
    print_config("sweep", j);

    const PokerProvider p(d, load_golden(tpath, d));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);

    const auto result = run_sweep(p, c, [](const RunResult& r) {
      std::cerr << "done k=" << r.k << " seed=" << r.seed << " best_mae_evalaxis=" << format_double(r.best_mae_evalaxis)
                << " best_mae_updateaxis=" << format_double(r.best_mae_updateaxis) << '\n';
    });
    emit_report(result, dir);

    std::cout << "k,n,median_best_mae_evalaxis,median_best_mae_updateaxis,seeds_done\n";
    for (const auto& s : summarize(result))
      std::cout << s.k << ',' << s.n << ',' << (s.mae_evalaxis.present ? format_double(s.mae_evalaxis.median) : "NA")
                << ',' << (s.mae_updateaxis.present ? format_double(s.mae_updateaxis.median) : "NA") << ','
                << s.mae_evalaxis.present << '\n';
    std::cout << "report: " << dir << '\n';
    if (result.failure) {
      std::cerr << "iseval: run k=" << result.failure->k << " seed=" << result.failure->seed
                << " failed: " << result.failure->message << "; partial results written\n";
      return kPartial;
    }
    return kOk;
  }
};

struct GradCheckCmd {
  std::uint64_t networks = 5;
  std::string hidden = "16";
  std::size_t batch = 32;
  double epsilon = 1e-4;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;

  int run() {
    print_config("gradcheck", {{"networks", networks}, {"hidden", hidden}, {"batch", batch}, {"epsilon", epsilon},
                               {"tolerance", tolerance}, {"seed", seed}});
    const auto features = one_hot_features(PokerProvider().observables());
    std::vector<std::size_t> sizes{features.width()};
    for (auto h : parse_u64_list(hidden, "hidden size")) sizes.push_back(static_cast<std::size_t>(h));
    sizes.push_back(1);
    bool ok = true;
    for (std::uint64_t i = 0; i < networks; ++i) {
      const auto m = Mlp::random(sizes, seed + i);
      CounterRng rng(seed + i, 1);
      std::vector<Sample> b;
      for (std::size_t j = 0; j < batch; ++j) b.push_back({features.row(rng.below(features.size())), rng.uniform()});
      const auto r = grad_check(m, b, epsilon, seed + i);
      ok &= r.max_relative_error < tolerance;
      std::cout << "network=" << i << " parameters_checked=" << r.parameters_checked
                << " max_relative_error=" << format_double(r.max_relative_error) << '\n';
    }
    std::cout << (ok ? "PASS" : "FAIL") << '\n';
    return ok ? kOk : kCheckFailed;
  }
};

struct ProfileCmd {
  std::string hands = "AA,KK,AKs,T9s,72o";
  std::string ks = "1,2,3,5,10,50";
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  std::string deck = "full";
  std::string table;
  std::size_t bins = 50;
  std::string out;
  unsigned workers = default_workers();

  int run() {
    const Deck d = Deck::parse(deck);
    const std::string dir = out.empty() ? (fs::path(default_out_dir()) / "profile").string() : out;
    std::vector<CanonicalHand> hs;
    std::stringstream ss(hands);
    for (std::string item; std::getline(ss, item, ',');) hs.push_back(parse_hand_code(item));
    if (hs.empty()) throw InvalidInput("no hands given");
    const auto kv = parse_u64_list(ks, "k");
    if (bins < 1) throw InvalidInput("bins must be at least 1");
    const std::string truth_source = d.is_full() ? (table.empty() ? default_golden_path() : table) : "exact";
    print_config("profile-error", {{"hands", hands}, {"ks", join(kv)}, {"trials", trials}, {"seed", seed},
                                   {"deck", d.name()}, {"truth", truth_source}, {"bins", bins}, {"out", dir},
                                   {"workers", workers}});

    std::vector<double> truths;
    if (d.is_full()) {
      const auto g = load_golden(truth_source, d);
      for (const auto& h : hs) truths.push_back(g->lookup(h)->equity);
    } else {
      for (const auto& h : hs) truths.push_back(exact_equity(h, d, workers).mean);
    }
    const auto rows = error_profile(hs, truths, kv, trials, d, seed, workers, bins);

    std::string summary = "k,hand,truth,mean_estimate,variance,mean_abs_error\n";
    std::string hist = "k,bin_lo,bin_hi,count\n";
    std::string overall = "k,mean_abs_error\n";
    for (const auto& r : rows) {
      overall += std::to_string(r.k) + ',' + format_double(r.mean_abs_error) + '\n';
      for (const auto& c : r.cells)
        summary += std::to_string(r.k) + ',' + c.hand.code() + ',' + format_fixed(c.truth, 9) + ',' +
                   format_double(c.mean_estimate()) + ',' + format_double(c.variance()) + ',' +
                   format_double(c.mean_abs_error()) + '\n';
      for (std::size_t b = 0; b < r.error_histogram.size(); ++b)
        hist += std::to_string(r.k) + ',' + format_double(static_cast<double>(b) / static_cast<double>(bins)) + ',' +
                format_double(static_cast<double>(b + 1) / static_cast<double>(bins)) + ',' +
                std::to_string(r.error_histogram[b]) + '\n';
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
    write_file((fs::path(dir) / "profile.csv").string(), summary);
    write_file((fs::path(dir) / "histogram.csv").string(), hist);
    write_file((fs::path(dir) / "mae_by_k.csv").string(), overall);
    std::cout << overall << "report: " << dir << '\n';
    return kOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-set evaluation: poker equity, k-sample datasets and the budget sweep"};
  app.require_subcommand(1);
  std::function<int()> action;

  RankCmd rank;
  auto* c = app.add_subcommand("rank", "Rank a 5- or 7-card hand");
  c->add_option("--cards", rank.cards, "Concatenated card codes, e.g. AsKsQsJsTs")->required();
  c->add_option("--deck", rank.deck, "full or short:R")->capture_default_str();
  c->callback([&] { action = [&] { return rank.run(); }; });

  EquityCmd eq;
  c = app.add_subcommand("equity", "Exact or k-sample equity of a canonical hand");
  c->add_option("--hand", eq.hand, "Canonical hand code, e.g. AKs")->required();
  c->add_option("--mode", eq.mode, "exact or mc")->capture_default_str();
  c->add_option("--k", eq.k, "Samples for mc mode")->capture_default_str();
  c->add_option("--seed", eq.seed, "RNG seed")->capture_default_str();
  c->add_option("--trial", eq.trial, "Independent stream index for mc mode")->capture_default_str();
  c->add_option("--deck", eq.deck, "full or short:R")->capture_default_str();
  c->add_flag("--confirm-long", eq.confirm_long, "Allow exact enumeration of the full deck");
  c->add_option("--workers", eq.workers, "Worker threads")->capture_default_str();
  c->callback([&] { action = [&] { return eq.run(); }; });

  McCmd mc;
  c = app.add_subcommand("mc", "Repeated k-sample estimates of one hand");
  c->add_option("--hand", mc.hand, "Canonical hand code")->required();
  c->add_option("--k", mc.k, "Samples per estimate")->capture_default_str();
  c->add_option("--trials", mc.trials, "Number of estimates")->capture_default_str();
  c->add_option("--seed", mc.seed, "RNG seed")->capture_default_str();
  c->add_option("--deck", mc.deck, "full or short:R")->capture_default_str();
  c->add_option("--out", mc.out, "CSV file; stdout if omitted");
  c->add_option("--workers", mc.workers, "Worker threads")->capture_default_str();
  c->callback([&] { action = [&] { return mc.run(); }; });

  TableCmd table;
  c = app.add_subcommand("table", "Regenerate the ground-truth equity table");
  c->add_option("--mode", table.mode, "exact or mc")->capture_default_str();
  c->add_option("--samples", table.samples, "Samples per hand in mc mode")->capture_default_str();
  c->add_option("--seed", table.seed, "RNG seed for mc mode")->capture_default_str();
  c->add_option("--deck", table.deck, "full or short:R")->capture_default_str();
  c->add_option("--out", table.out, "Output CSV; defaults under $ISEVAL_OUT_DIR");
  c->add_option("--workers", table.workers, "Worker threads")->capture_default_str();
  c->callback([&] { action = [&] { return table.run(); }; });

  GenCmd gen;
  c = app.add_subcommand("gen", "Build a k-sample training dataset");
  c->add_option("--budget", gen.budget, "Total evaluations N")->capture_default_str();
  c->add_option("--k", gen.k, "Evaluations per example")->capture_default_str();
  c->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
  c->add_option("--deck", gen.deck, "full or short:R")->capture_default_str();
  c->add_option("--table", gen.table, "Golden table whose hash is recorded");
  c->add_option("--out", gen.out, "Output CSV; defaults under $ISEVAL_OUT_DIR");
  c->add_option("--workers", gen.workers, "Worker threads")->capture_default_str();
  c->callback([&] { action = [&] { return gen.run(); }; });

  TrainCmd tr;
  c = app.add_subcommand("train", "Train one network and write its trajectory and checkpoint");
  c->add_option("--data", tr.data, "Dataset CSV from `gen`; generated in memory if omitted");
  c->add_option("--budget", tr.budget, "Total evaluations N when generating")->capture_default_str();
  c->add_option("--k", tr.k, "Evaluations per example when generating")->capture_default_str();
  c->add_option("--seed", tr.seed, "Seed for data, initialization and shuffling")->capture_default_str();
  c->add_option("--deck", tr.deck, "full or short:R")->capture_default_str();
  c->add_option("--table", tr.table, "Golden table for validation");
  c->add_option("--encoding", tr.encoding, "onehot or compact")->capture_default_str();
  c->add_option("--out", tr.out, "Output directory; defaults to $ISEVAL_OUT_DIR");
  c->add_option("--workers", tr.workers, "Worker threads for data generation")->capture_default_str();
  tr.flags.add(c);
  c->callback([&] { action = [&] { return tr.run(); }; });

  SweepCmd sw;
  c = app.add_subcommand("sweep", "Budget sweep over k with evaluation- and update-equated comparison");
  c->add_option("--budget", sw.budget, "Total evaluations N per dataset")->capture_default_str();
  c->add_option("--ks", sw.ks, "Comma-separated k values")->capture_default_str();
  c->add_option("--seeds", sw.seeds, "Comma-separated seeds")->capture_default_str();
  c->add_option("--update-axis-updates", sw.update_axis_updates,
                "Equal update count for the update axis, 0 = budget/100")
      ->capture_default_str();
  c->add_option("--evalaxis-epochs", sw.evalaxis_epochs,
                "Passes over each dataset on the evaluation axis, 0 = train to patience")
      ->capture_default_str();
  c->add_option("--encoding", sw.encoding, "onehot or compact")->capture_default_str();
  c->add_option("--deck", sw.deck, "full or short:R")->capture_default_str();
  c->add_option("--table", sw.table, "Golden table for validation");
  c->add_option("--out", sw.out, "Report directory; defaults to $ISEVAL_OUT_DIR/sweep");
  c->add_flag("--wallclock", sw.wallclock, "Record wall-clock seconds (makes reports non-reproducible)");
  c->add_option("--workers", sw.workers, "Concurrent training runs")->capture_default_str();
  sw.flags.add(c);
  c->callback([&] { action = [&] { return sw.run(); }; });

  GradCheckCmd gc;
  c = app.add_subcommand("gradcheck", "Compare analytic gradients with central differences");
  c->add_option("--networks", gc.networks, "Random networks to check")->capture_default_str();
  c->add_option("--hidden", gc.hidden, "Hidden layer sizes")->capture_default_str();
  c->add_option("--batch", gc.batch, "Batch size")->capture_default_str();
  c->add_option("--epsilon", gc.epsilon, "Finite-difference step")->capture_default_str();
  c->add_option("--tolerance", gc.tolerance, "Maximum relative error")->capture_default_str();
  c->add_option("--seed", gc.seed, "RNG seed")->capture_default_str();
  c->callback([&] { action = [&] { return gc.run(); }; });

  ProfileCmd pe;
  c = app.add_subcommand("profile-error", "Distribution of k-sample estimate errors");
  c->add_option("--hands", pe.hands, "Comma-separated hand codes")->capture_default_str();
  c->add_option("--ks", pe.ks, "Comma-separated k values")->capture_default_str();
  c->add_option("--trials", pe.trials, "Estimates per hand and k")->capture_default_str();
  c->add_option("--seed", pe.seed, "RNG seed")->capture_default_str();
  c->add_option("--deck", pe.deck, "full (truth from table) or short:R (truth enumerated)")->capture_default_str();
  c->add_option("--table", pe.table, "Golden table for full-deck truths");
  c->add_option("--bins", pe.bins, "Histogram bins on [0,1]")->capture_default_str();
  c->add_option("--out", pe.out, "Report directory; defaults to $ISEVAL_OUT_DIR/profile");
  c->add_option("--workers", pe.workers, "Worker threads")->capture_default_str();
  c->callback([&] { action = [&] { return pe.run(); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return action();
  } catch (const IoError& e) {
    std::cerr << "iseval: " << e.what() << '\n';
    return kIo;
  } catch (const InvalidInput& e) {
    std::cerr << "iseval: " << e.what() << '\n';
    return kUsage;
  } catch (const NoGroundTruth& e) {
    std::cerr << "iseval: " << e.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "iseval: malformed JSON: " << e.what() << '\n';
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "iseval: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "iseval: " << e.what() << '\n';
    return kUsage;
  }
}
