#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "eqop/errors.hpp"
#include "eqop/imaging.hpp"
#include "eqop/models.hpp"

using namespace eqop;
using json = nlohmann::json;

namespace {

Eigen::VectorXcd random_code(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Eigen::VectorXcd z(n);
  for (auto& v : z) v = {n01(rng), n01(rng)};
  return z;
}

// Small shapes on 8 x 8 images with 4 exact quarter turns.
DatasetBundle tiny_dataset(std::uint64_t seed) {
  const auto shapes = gen_shapes(10, seed, 8);
  return build_dataset(shapes, TransformSpec::make(4, 1, 1), {}, PairAnchors::Orbit, {40, 16, 40}, seed);
}

TrainConfig tiny_config(Variant v) {
  TrainConfig cfg;
  cfg.variant = v;
  cfg.orders = {4};
  cfg.latent_dim = 64;
  cfg.epochs = 3;
  cfg.batch = 8;
  cfg.lr = 1e-2;
  cfg.seed = 3;
  if (v == Variant::Disentangled) cfg.op = OperatorKind::Disentangled;
  if (v == Variant::Weak) {
    cfg.op = OperatorKind::Complex;
    cfg.weak.k_latent = 4;
  }
  return cfg;
}

}  // namespace

TEST_CASE("config JSON") {
  const auto cfg = TrainConfig::from_json(json::parse(R"({"variant": "weak", "latent_dim": 784})"));
  CHECK(cfg.variant == Variant::Weak);
  CHECK(cfg.op == OperatorKind::Complex);
  CHECK(cfg.weak.k_latent == 10);
  CHECK(cfg.weak.temperature == 0.1);
  CHECK(TrainConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());
  CHECK(TrainConfig::from_json(cfg.to_json()).hash() == cfg.hash());
  auto other = cfg;
  other.seed = 1;
  CHECK(other.hash() != cfg.hash());

  const auto stacked = TrainConfig::from_json(
      json::parse(R"({"variant": "stacked", "group": {"kind": "semidirect", "orders": [4, 5, 5]}})"));
  CHECK(stacked.stages() == 3);
  CHECK(stacked.group_kind == GroupKind::SemiDirect);
  CHECK(TrainConfig::from_json(json::parse(R"({"variant": "stacked", "group": {"orders": [5, 5]}})")).group_kind ==
        GroupKind::DirectProduct);
  // Five rotations do not act on the translations; declared as a plain product.
  CHECK_NOTHROW(TrainConfig::from_json(
      json::parse(R"({"variant": "stacked", "group": {"kind": "direct", "orders": [5, 5, 5]}})")));

  CHECK_THROWS_AS(TrainConfig::from_json(json::parse(R"({"varient": "shift"})")), ValidationError);
  CHECK_THROWS_AS(TrainConfig::from_json(json::parse(R"({"weak": {"tau": 1}})")), ValidationError);
  CHECK_THROWS_AS(TrainConfig::from_json(json::parse(R"({"lr": "fast"})")), ValidationError);
  CHECK_THROWS_AS(TrainConfig::from_json(json::parse(R"([1, 2])")), ValidationError);
  CHECK_THROWS_AS(TrainConfig::from_json(json::parse(R"({"variant": "weak", "weak": {"temperature": 0}})")),
                  ValidationError);
  CHECK_THROWS_AS(TrainConfig::from_json(json::parse(R"({"variant": "weak", "weak": {"k_latent": 0}})")),
                  ValidationError);
}

TEST_CASE("shipped configs parse") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(EQOP_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    std::ifstream in(entry.path());
    const auto cfg = TrainConfig::from_json(json::parse(in));
    CHECK(TrainConfig::from_json(cfg.to_json()).hash() == cfg.hash());
    ++count;
  }
  CHECK(count >= 6);
}

TEST_CASE("config validation") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());  // latent 800, K 10, permutation: the reference setting
  cfg.latent_dim = 805;
  CHECK_THROWS_AS(cfg.validate(), DimensionError);
  cfg.op = OperatorKind::Complex;
  CHECK_NOTHROW(cfg.validate());  // complex diagonal truncates
  cfg = TrainConfig{};
  cfg.orders = {5, 5};
  cfg.group_kind = GroupKind::DirectProduct;
  CHECK_THROWS_AS(cfg.validate(), UnsupportedError);
  cfg.variant = Variant::Weak;
  cfg.op = OperatorKind::Complex;
  CHECK_THROWS_AS(cfg.validate(), UnsupportedError);
  cfg = TrainConfig{};
  cfg.variant = Variant::Stacked;
  cfg.op = OperatorKind::Complex;
  CHECK_THROWS_AS(cfg.validate(), UnsupportedError);  // one factor
  cfg.orders = {2, 2, 2, 2};
  cfg.group_kind = GroupKind::DirectProduct;
  CHECK_THROWS_AS(cfg.validate(), UnsupportedError);
  cfg = TrainConfig{};
  cfg.variant = Variant::Disentangled;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);  // needs the disentangled operator
  cfg.op = OperatorKind::Disentangled;
  CHECK_NOTHROW(cfg.validate());
  cfg.latent_dim = 1;
  CHECK_THROWS_AS(cfg.validate(), DimensionError);
  cfg = TrainConfig{};
  cfg.variant = Variant::Weak;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);  // weak needs the complex family
  cfg = TrainConfig{};
  cfg.lr = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("infer_shift_scores") {
  std::mt19937_64 rng(4);
  const auto z1 = random_code(40, rng);
  const auto same = infer_shift_scores(z1, z1, 10);
  Eigen::Index best = 0;
  same.maxCoeff(&best);
  CHECK(best == 0);
  CHECK(same(0) == doctest::Approx(1.0));
  for (int k = 0; k < 10; ++k) {
    const auto z2 = shift_operator_complex(10, 40, k).apply(z1);
    const auto s = infer_shift_scores(z1, z2, 10);
    s.maxCoeff(&best);
    CHECK(best == k);
    CHECK(s(k) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Summation oracle: score(kappa) = mean Re(cps_n exp(2 pi i kappa (n mod K) / K)).
  const auto z2 = random_code(40, rng);
  const auto s = infer_shift_scores(z1, z2, 7);
  for (int kappa = 0; kappa < 7; ++kappa) {
    double acc = 0.0;
    for (int n = 0; n < 40; ++n) {
      const auto c = z1(n) * std::conj(z2(n));
      acc += (c / std::abs(c) * std::polar(1.0, 2 * M_PI * kappa * (n % 7) / 7.0)).real();
    }
    CHECK(s(kappa) == doctest::Approx(acc / 40).epsilon(1e-12));
  }
  // Unrelated codes score low.
  int low = 0;
  for (int trial = 0; trial < 50; ++trial) {
    if (infer_shift_scores(random_code(784, rng), random_code(784, rng), 10).maxCoeff() < 0.5) ++low;
  }
  CHECK(low == 50);
  // Degenerate entries contribute zero.
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(40);
  CHECK(infer_shift_scores(zero, z1, 10).norm() == 0.0);
  CHECK_THROWS_AS(infer_shift_scores(z1, random_code(39, rng), 10), DimensionError);
  CHECK_THROWS_AS(infer_shift_scores(z1, z1, 0), ValidationError);
}

TEST_CASE("weak weights are a soft-max of the scores") {
  std::mt19937_64 rng(6);
  numkit::ComplexMatrix z1(40, 2), z2(40, 2);
  z1.col(0) = random_code(40, rng);
  z1.col(1) = random_code(40, rng);
  z2.col(0) = shift_operator_complex(10, 40, 3).apply(z1.col(0));
  z2.col(1) = random_code(40, rng);
  const auto a = weak_weights(z1, z2, 10, 0.1);
  CHECK(a.rows() == 10);
  CHECK(a.colwise().sum().isApproxToConstant(1.0, 1e-12));
  Eigen::Index best = 0;
  a.col(0).maxCoeff(&best);
  CHECK(best == 3);
  const auto s = infer_shift_scores(z1.col(1), z2.col(1), 10);
  CHECK(a(2, 1) / a(5, 1) == doctest::Approx(std::exp((s(2) - s(5)) / 0.1)));
  // tau -> 0 gives a one-hot weight.
  CHECK(weak_weights(z1, z2, 10, 1e-4)(3, 0) == doctest::Approx(1.0));
}

TEST_CASE("latent transforms compose exactly") {
  TrainConfig cfg = tiny_config(Variant::Shift);
  Model model{cfg, init_params(cfg, 64)};
  const auto img = gen_shapes(1, 9, 8)[0];
  const OperatorBank bank(cfg);
  // Unclamped reconstructions: the clamp would hide small discrepancies.
  auto apply_twice = [&](GroupElement a, GroupElement b) {
    auto z = encode(model.params, img.vector());
    for (const auto& g : {a, b}) {
      numkit::ComplexMatrix m = z;
      for (const auto* op : bank.chain(g)) op->apply_inplace(m);
      z = m;
    }
    return z;
  };
  const auto spec = GroupSpec::cyclic(4);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      auto once = encode(model.params, img.vector());
      for (const auto* op : bank.chain(compose(GroupElement{b}, GroupElement{a}, spec))) op->apply_inplace(once);
      CHECK((apply_twice({a}, {b}) - once).norm() < 1e-12);
    }
  }
  // Full cycle equals identity.
  ImageGrid x = img;
  const auto identity_out = apply_latent_transform(model, img, {0});
  auto z = encode(model.params, img.vector());
  for (int i = 0; i < 4; ++i) {
    for (const auto* op : bank.chain({1})) op->apply_inplace(z);
  }
  CHECK((z - encode(model.params, img.vector())).norm() == 0.0);
  for (double v : identity_out.pixels()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK_THROWS_AS(apply_latent_transform(model, ImageGrid(3, 3), {0}), DimensionError);
  CHECK_THROWS_AS(apply_latent_transform(model, img, {4}), ValidationError);
}

TEST_CASE("checkpoint round trip") {
  for (Variant v : {Variant::Shift, Variant::Disentangled, Variant::Weak}) {
    const auto cfg = tiny_config(v);
    const Model m{cfg, init_params(cfg, 64)};
    const auto bytes = encode_checkpoint(m);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "EQCK");
    const Model back = decode_checkpoint(bytes);
    CHECK(back.params == m.params);
    CHECK(back.config.to_json() == cfg.to_json());
    auto bad = bytes;
    bad.pop_back();
    CHECK_THROWS_AS(decode_checkpoint(bad), ParseError);
    bad = bytes;
    bad[0] = 'Z';
    CHECK_THROWS_AS(decode_checkpoint(bad), ParseError);
  }
  TrainConfig st;
  st.variant = Variant::Stacked;
  st.op = OperatorKind::Complex;
  st.group_kind = GroupKind::DirectProduct;
  st.orders = {4, 4, 4};
  st.latent_dim = 16;
  const Model m{st, init_params(st, 9)};
  CHECK(m.params.intermediates.size() == 2);
  const auto dir = std::filesystem::temp_directory_path() / "eqop_test_models";
  std::filesystem::create_directories(dir);
  write_checkpoint(m, dir / "m.eqck");
  CHECK(read_checkpoint(dir / "m.eqck").params == m.params);
  CHECK_THROWS_AS(read_checkpoint(dir / "none.eqck"), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("training") {
  const auto data = tiny_dataset(1);
  SUBCASE("identity-only pairs reduce to autoencoding") {
    DatasetBundle id = data;
    for (auto* split : {&id.train, &id.val, &id.test}) {
      for (auto& p : *split) {
        p.x2 = p.x1;
        p.param = {0};
      }
    }
    auto cfg = tiny_config(Variant::Shift);
    cfg.epochs = 400;
    const auto r = train(id, cfg);
    CHECK(r.history.size() == 400);
    CHECK(r.history.back().train_loss < 1e-3);
    CHECK(r.history.back().equivariance_residual < 1e-2);
  }
  SUBCASE("history and best checkpoint") {
    const auto cfg = tiny_config(Variant::Shift);
    const auto r = train(data, cfg);
    REQUIRE(r.history.size() == 3);
    double best = r.history[0].val_loss;
    int best_epoch = 1;
    for (const auto& h : r.history) {
      CHECK(std::isfinite(h.train_loss));
      CHECK(std::isfinite(h.equivariance_residual));
      if (h.val_loss < best) {
        best = h.val_loss;
        best_epoch = h.epoch;
      }
    }
    CHECK(r.best_epoch == best_epoch);
    CHECK(r.optimizer.step == 3 * 5);
    const auto side = checkpoint_sidecar(r);
    CHECK(side["best_epoch"] == best_epoch);
    CHECK(side["config_hash"].is_string());
  }
  SUBCASE("deterministic given the seed") {
    for (Variant v : {Variant::Shift, Variant::Weak}) {
      const auto cfg = tiny_config(v);
      CHECK(encode_checkpoint(train(data, cfg).model) == encode_checkpoint(train(data, cfg).model));
    }
  }
  SUBCASE("incompatible data") {
    auto cfg = tiny_config(Variant::Shift);
    cfg.orders = {8};
    CHECK_THROWS_AS(train(data, cfg), ValidationError);
    DatasetBundle empty = data;
    empty.val.clear();
    CHECK_THROWS_AS(train(empty, tiny_config(Variant::Shift)), ValidationError);
    CHECK_THROWS_AS(train_weak(data, tiny_config(Variant::Shift)), ValidationError);
  }
}
