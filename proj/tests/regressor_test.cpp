#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <memory>

#include "iseval/regressor.hpp"

using namespace iseval;

namespace {

SyntheticProvider three_observables() {
  return SyntheticProvider(std::vector<SyntheticProvider::Entry>{
      {{0}, {0.0, 1.0}}, {{1}, {0.0, 0.5, 1.0, 1.0}}, {{2}, {1.0, 1.0, 1.0, 0.0, 0.5}}});
}

std::vector<Sample> random_batch(const FeatureTable& f, std::size_t size, std::uint64_t seed) {
  CounterRng rng(seed, 99);
  std::vector<Sample> out;
  for (std::size_t i = 0; i < size; ++i) out.push_back({f.row(rng.below(f.size())), rng.uniform()});
  return out;
}

TrainConfig small_config() {
  TrainConfig c;
  c.hidden = {16};
  c.max_updates = 4000;
  c.eval_every = 50;
  c.patience = 0;
  c.seed = 5;
  return c;
}

}  // namespace

TEST(Forward, ZeroParametersGiveOneHalf) {
  const auto m = Mlp::zeros({169, 64, 64, 1});
  std::vector<double> x(169, 0.0);
  x[3] = 1.0;
  EXPECT_EQ(m.forward(x), 0.5);
}

TEST(Forward, ShapeMismatchNamesBothLengths) {
  const auto m = Mlp::zeros({169, 4, 1});
  try {
    m.forward(std::vector<double>(27, 0.0));
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("169"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("27"), std::string::npos);
  }
}

TEST(Forward, DeterministicAndInsideUnitInterval) {
  const auto f = one_hot_features(PokerProvider().observables());
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto m = Mlp::random({169, 64, 64, 1}, seed);
    const double a = m.forward(f.row(0));
    EXPECT_EQ(a, m.forward(f.row(0)));
    EXPECT_GT(a, 0.0);
    EXPECT_LT(a, 1.0);
    EXPECT_NE(a, m.forward(f.row(100)));
  }
}

TEST(Forward, ParameterCountIsReported) {
  EXPECT_EQ(Mlp::zeros({169, 64, 64, 1}).parameter_count(), 169u * 64 + 64 + 64 * 64 + 64 + 64 + 1);
  EXPECT_THROW(Mlp::zeros({10, 2}), InvalidInput);
  EXPECT_THROW(Mlp::zeros({10}), InvalidInput);
}

TEST(Features, CompactEncodingHasRanksAndSuitedFlag) {
  const auto f = compact_poker_features(Deck::full());
  EXPECT_EQ(f.width(), 27u);
  const auto aks = f.features({static_cast<std::uint32_t>(hand_index(parse_hand_code("AKs"), Deck::full()))});
  EXPECT_EQ(aks.values[12], 1.0);
  EXPECT_EQ(aks.values[13 + 11], 1.0);
  EXPECT_EQ(aks.values[26], 1.0);
  double sum = 0;
  for (double v : aks.values) sum += v;
  EXPECT_EQ(sum, 3.0);
  EXPECT_EQ(make_features(PokerProvider(), "onehot").width(), 169u);
  EXPECT_THROW(make_features(three_observables(), "compact"), InvalidInput);
}

TEST(Loss, Examples) {
  const auto m = Mlp::zeros({2, 3, 1});
  const std::vector<double> x{1.0, 0.0};
  EXPECT_EQ(loss(m, std::vector<Sample>{{x, 0.5}}), 0.0);
  EXPECT_EQ(loss(m, std::vector<Sample>{{x, 1.0}}), 0.25);
  EXPECT_DOUBLE_EQ(loss(m, std::vector<Sample>{{x, 1.0}, {x, 0.5}, {x, 0.0}}), (0.25 + 0 + 0.25) / 3);
  EXPECT_THROW(loss(m, std::vector<Sample>{}), InvalidInput);
}

TEST(GradCheck, AnalyticMatchesCentralDifferences) {
  const auto f = one_hot_features(PokerProvider().observables());
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto m = Mlp::random({169, 16, 1}, seed);
    const auto batch = random_batch(f, 32, seed);
    const auto r = grad_check(m, batch, 1e-4, seed);
    EXPECT_GE(r.parameters_checked, 200u);
    EXPECT_LT(r.max_relative_error, 1e-4) << seed;
  }
}

TEST(GradCheck, DeeperNetworkAndDenseInputs) {
  const auto f = compact_poker_features(Deck::full());
  const auto m = Mlp::random({27, 8, 8, 1}, 3);
  const auto r = grad_check(m, random_batch(f, 16, 3), 1e-5, 3);
  EXPECT_LT(r.max_relative_error, 1e-4);
}

TEST(GradCheck, ZeroLossBatchIsStationary) {
  const auto f = one_hot_features(PokerProvider().observables());
  const auto m = Mlp::random({169, 16, 1}, 11);
  auto batch = random_batch(f, 20, 11);
  for (auto& s : batch) s.target = m.forward(s.features);
  std::vector<double> g(m.parameter_count());
  EXPECT_EQ(loss_and_gradient(m, batch, g), 0.0);
  double norm = 0;
  for (double v : g) norm += v * v;
  EXPECT_LT(std::sqrt(norm), 1e-8);
}

TEST(GradCheck, CorruptedGradientIsCaught) {
  const auto f = one_hot_features(PokerProvider().observables());
  const auto m = Mlp::random({169, 16, 1}, 2);
  const auto batch = random_batch(f, 32, 2);
  auto corrupted = [](const Mlp& net, std::span<const Sample> b, std::span<double> g) {
    loss_and_gradient(net, b, g);
    for (double& v : g) v *= 1.01;
  };
  EXPECT_GT(grad_check(m, batch, 1e-4, 2, 200, corrupted).max_relative_error, 1e-4);
  EXPECT_THROW(grad_check(m, batch, 1e-2), InvalidInput);
}

TEST(Train, ExhaustiveSyntheticDatasetIsLearned) {
  const auto p = three_observables();
  const auto f = one_hot_features(p.observables());
  const auto ds = generate_dataset(p, BudgetPlan(3000, 10), 1);
  for (const auto& e : ds.examples) EXPECT_EQ(e.target, *p.ground_truth(e.observable));
  const auto cfg = small_config();
  const auto r = train(Mlp::random(layer_sizes(f.width(), cfg), cfg.seed), make_training_set(ds, f),
                       make_validation_set(p, f), cfg);
  EXPECT_LT(r.best_point().mae, 1e-3);
}

TEST(Train, PredictionsConvergeToTheMean) {
  const auto p = three_observables();
  const auto f = one_hot_features(p.observables());
  const auto ds = generate_dataset(p, BudgetPlan(100000, 1), 2);
  auto cfg = small_config();
  cfg.max_updates = 6000;
  cfg.batch_size = 256;
  const auto r = train(Mlp::random(layer_sizes(f.width(), cfg), cfg.seed), make_training_set(ds, f),
                       make_validation_set(p, f), cfg);
  for (auto x : p.observables())
    EXPECT_NEAR(r.best.forward(f.features(x).values), *p.ground_truth(x), 0.02) << x.value;
}

TEST(Train, SameSeedSameTrajectory) {
  const auto p = three_observables();
  const auto f = one_hot_features(p.observables());
  const auto ds = generate_dataset(p, BudgetPlan(5000, 1), 3);
  auto cfg = small_config();
  cfg.max_updates = 500;
  const auto ts = make_training_set(ds, f);
  const auto vs = make_validation_set(p, f);
  const auto a = train(Mlp::random(layer_sizes(f.width(), cfg), 1), ts, vs, cfg);
  const auto b = train(Mlp::random(layer_sizes(f.width(), cfg), 1), ts, vs, cfg);
  EXPECT_EQ(trajectory_to_csv(a.trajectory), trajectory_to_csv(b.trajectory));
  EXPECT_EQ(a.trajectory.front().updates, 0u);
  EXPECT_EQ(a.trajectory.back().updates, 500u);
  for (const auto& pt : a.trajectory) EXPECT_EQ(pt.evaluations, 5000u);
}

TEST(Train, StopsOnPatienceAndEpochs) {
  const auto p = three_observables();
  const auto f = one_hot_features(p.observables());
  const auto ds = generate_dataset(p, BudgetPlan(640, 1), 4);
  auto cfg = small_config();
  cfg.max_epochs = 3;
  auto r = train(Mlp::random(layer_sizes(f.width(), cfg), 1), make_training_set(ds, f), make_validation_set(p, f),
                 cfg);
  EXPECT_EQ(r.stop, StopReason::MaxEpochs);
  EXPECT_EQ(r.updates, 30u);

  cfg.max_epochs = 0;
  cfg.max_updates = 100000;
  cfg.eval_every = 10;
  cfg.patience = 5;
  r = train(Mlp::random(layer_sizes(f.width(), cfg), 1), make_training_set(ds, f), make_validation_set(p, f), cfg);
  EXPECT_EQ(r.stop, StopReason::Patience);
  EXPECT_LT(r.updates, 100000u);
  EXPECT_EQ(r.trajectory.size() - 1 - r.best_index, 5u);
}

TEST(Train, NonFiniteParametersAbortWithUpdateIndex) {
  const auto p = three_observables();
  const auto f = one_hot_features(p.observables());
  const auto ds = generate_dataset(p, BudgetPlan(100, 1), 4);
  auto cfg = small_config();
  auto m = Mlp::random(layer_sizes(f.width(), cfg), 1);
  m.params()[0] = std::nan("");
  try {
    train(m, make_training_set(ds, f), make_validation_set(p, f), cfg);
    FAIL();
  } catch (const TrainingDiverged& e) {
    EXPECT_EQ(e.update(), 0u);
  }
}

TEST(Train, RejectsBadConfig) {
  auto cfg = small_config();
  cfg.eval_every = 0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = small_config();
  cfg.learning_rate = 0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = small_config();
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
}

TEST(Train, OneSamplePokerTargetsAreNoisyButValidationImproves) {
  auto golden = std::make_shared<const GoldenTable>(GoldenTable::load(default_golden_path()));
  const PokerProvider p(Deck::full(), golden);
  const auto f = one_hot_features(p.observables());
  const auto ds = generate_dataset(p, BudgetPlan(100000, 1), 6, default_workers());
  TrainConfig cfg;
  cfg.max_updates = 3000;
  cfg.eval_every = 100;
  cfg.patience = 0;
  const auto r = train(Mlp::random(layer_sizes(f.width(), cfg), 0), make_training_set(ds, f),
                       make_validation_set(p, f), cfg);
  EXPECT_GT(r.trajectory.back().train_loss, 0.1);
  EXPECT_LT(r.best_point().mae, 0.5 * r.trajectory.front().mae);
}

TEST(Checkpoint, RoundTripsExactly) {
  auto cfg = small_config();
  cfg.optimizer = OptimizerKind::Sgd;
  const Checkpoint c{Mlp::random({169, 16, 1}, 8), cfg, 8};
  const auto path = (std::filesystem::temp_directory_path() / "iseval_ckpt.bin").string();
  save_checkpoint(path, c);
  const auto back = load_checkpoint(path);
  EXPECT_EQ(back.model.sizes(), c.model.sizes());
  EXPECT_TRUE(std::equal(back.model.params().begin(), back.model.params().end(), c.model.params().begin()));
  EXPECT_EQ(back.config.to_json(), cfg.to_json());
  EXPECT_EQ(back.seed, 8u);
  EXPECT_EQ(encode_checkpoint(back), read_file(path));
  std::string bytes = read_file(path);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, bytes.size() - 3)), ParseError);
  bytes[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bytes), ParseError);
  std::filesystem::remove(path);
}
