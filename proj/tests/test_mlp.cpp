#include <catch_amalgamated.hpp>

#include "support/error_code.hpp"
#include "support/experiments.hpp"

using namespace emorec;
using Catch::Matchers::WithinAbs;

TEST_CASE("sigmoid") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK_THAT(sigmoid(2.0) + sigmoid(-2.0), WithinAbs(1.0, 1e-15));
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(800.0) == 1.0);
}

TEST_CASE("network layout") {
  MlpNetwork net(3, 5, 2);
  CHECK(net.params().size() == 5 * 3 + 5 + 2 * 5 + 2);
  // all-zero weights give 0.5 everywhere
  const auto out = net.output(std::vector{0.2, 0.4, 0.9});
  CHECK(out == std::vector{0.5, 0.5});
  CHECK_THAT(net.loss(std::vector{0.2, 0.4, 0.9}, std::vector{1.0, 0.0}), WithinAbs(0.25, 1e-15));
}

TEST_CASE("backprop matches central differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const double err = experiments::mlp_gradient_error(seed);
    INFO("seed " << seed << " relative error " << err);
    CHECK(err <= 1e-4);
  }
}

TEST_CASE("xor is learned") {
  const int ok = experiments::xor_mlp_successes();
  INFO(ok << "/10 seeds");
  CHECK(ok >= 8);
}

TEST_CASE("training loss falls") {
  const auto d = fixtures::gaussian_blobs(3, 10, 4, 0.3, 5);
  MlpConfig cfg;
  cfg.hidden_units = 8;
  cfg.epochs = 200;
  const auto m = train_mlp(d.x, d.y, cfg);
  REQUIRE(m.epoch_loss.size() == 200);
  CHECK(m.epoch_loss.back() < 0.5 * m.epoch_loss.front());
  for (std::size_t i = 0; i < d.y.size(); ++i) CHECK(m.predict(d.x.row(i)) == d.y[i]);
}

TEST_CASE("single class set predicts that class") {
  fixtures::Labeled d = fixtures::gaussian_blobs(1, 8, 3, 1.0, 2);
  for (auto& y : d.y) y = 4;
  MlpConfig cfg;
  cfg.hidden_units = 3;
  cfg.epochs = 20;
  const auto m = train_mlp(d.x, d.y, cfg);
  CHECK(m.net.outputs() == 1);
  Rng rng(1);
  for (int t = 0; t < 20; ++t) CHECK(m.predict(std::vector{rng.gaussian(), rng.gaussian(), rng.gaussian()}) == 4);
}

TEST_CASE("predictions come from the class list") {
  const auto d = fixtures::gaussian_blobs(4, 6, 3, 2.0, 7);
  MlpConfig cfg;
  cfg.hidden_units = 4;
  cfg.epochs = 10;
  const auto m = train_mlp(d.x, d.y, cfg);
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const std::vector<double> x{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const int p = m.predict(x);
    CHECK(std::find(m.classes.begin(), m.classes.end(), p) != m.classes.end());
    CHECK(m.outputs(x) == m.outputs(x));
  }
  CHECK(code_of([&] { m.predict(std::vector{1.0}); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("mlp training is deterministic") {
  const auto d = fixtures::gaussian_blobs(3, 8, 4, 0.5, 1);
  MlpConfig cfg;
  cfg.hidden_units = 6;
  cfg.epochs = 30;
  const auto a = train_mlp(d.x, d.y, cfg);
  CHECK(a == train_mlp(d.x, d.y, cfg));
  CHECK(a.epoch_loss == train_mlp(d.x, d.y, cfg).epoch_loss);
  cfg.seed = 2;
  CHECK_FALSE(a == train_mlp(d.x, d.y, cfg));
}

TEST_CASE("mlp config validation") {
  CHECK(code_of([] { validate(MlpConfig{.epochs = 0}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { validate(MlpConfig{.hidden_units = 0}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { validate(MlpConfig{.momentum = 1.0}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { validate(MlpConfig{.learning_rate = -0.1}); }) == ErrorCode::InvalidConfig);
  CHECK_NOTHROW(validate(MlpConfig{}));
}

TEST_CASE("a huge learning rate saturates without a non-finite loss") {
  const auto d = fixtures::xor_data();
  MlpConfig cfg;
  cfg.hidden_units = 2;
  cfg.learning_rate = 1e300;
  cfg.epochs = 5;
  const auto m = train_mlp(d.x, d.y, cfg);
  for (double l : m.epoch_loss) CHECK(std::isfinite(l));
}
