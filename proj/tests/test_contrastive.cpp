#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "ovtrack/contrastive.hpp"
#include "ovtrack/error.hpp"
#include "ovtrack/gradcheck.hpp"

using namespace ovtrack;

namespace {

ContrastiveInstance axis_instance(std::vector<std::vector<double>> positives,
                                  std::vector<std::vector<double>> negatives,
                                  double temperature = 1.0) {
  ContrastiveInstance inst;
  inst.anchor = {1.0, 0.0};
  inst.positives = std::move(positives);
  inst.negatives = std::move(negatives);
  inst.temperature = temperature;
  return inst;
}

ContrastiveInstance random_instance(std::mt19937_64& gen, int dim, int n_pos,
                                    int n_neg) {
  ContrastiveInstance inst;
  inst.anchor = testing::random_unit(gen, dim);
  for (int i = 0; i < n_pos; ++i) {
    inst.positives.push_back(testing::random_unit(gen, dim));
  }
  for (int i = 0; i < n_neg; ++i) {
    inst.negatives.push_back(testing::random_unit(gen, dim));
  }
  std::uniform_real_distribution<double> temp(0.05, 1.0);
  inst.temperature = temp(gen);
  return inst;
}

}  // namespace

TEST_CASE("pos_d scalar fixtures") {
  CHECK(pos_d(axis_instance({{0.0, 1.0}}, {})) == doctest::Approx(1.0));
  CHECK(pos_d(axis_instance({{1.0, 0.0}}, {})) ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK(pos_d(axis_instance({{0.0, 1.0}, {1.0, 0.0}}, {})) ==
        doctest::Approx((1.0 + std::exp(1.0)) / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(pos_d(axis_instance({}, {})), InputError);
}

TEST_CASE("loss_track fixtures") {
  SUBCASE("single positive, no negatives, loss is exactly zero") {
    CHECK(instance_loss_track(axis_instance({{0.3, 0.4}}, {})) == 0.0);
  }
  SUBCASE("one aligned positive against one opposite negative") {
    // -ln(e / (e + 1/e)) = ln(1 + e^-2)
    const double expected = std::log(1.0 + std::exp(-2.0));
    CHECK(instance_loss_track(axis_instance({{1.0, 0.0}}, {{-1.0, 0.0}})) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("batch sums over anchors") {
    const auto inst = axis_instance({{1.0, 0.0}}, {{-1.0, 0.0}});
    CHECK(loss_track({inst, inst}) ==
          doctest::Approx(2.0 * instance_loss_track(inst)).epsilon(1e-12));
    CHECK(loss_track({inst, inst}, true) ==
          doctest::Approx(instance_loss_track(inst)).epsilon(1e-12));
  }
  SUBCASE("empty batch throws") {
    CHECK_THROWS_AS(loss_track({}), InputError);
  }
}

TEST_CASE("loss_track invariances") {
  std::mt19937_64 gen(3);
  for (int round = 0; round < 50; ++round) {
    auto inst = random_instance(gen, 6, 3, 4);
    const double base = instance_loss_track(inst);
    CHECK(base >= 0.0);

    auto shuffled = inst;
    std::shuffle(shuffled.positives.begin(), shuffled.positives.end(), gen);
    std::shuffle(shuffled.negatives.begin(), shuffled.negatives.end(), gen);
    CHECK(instance_loss_track(shuffled) == doctest::Approx(base).epsilon(1e-12));

    auto extended = inst;
    extended.negatives.push_back(testing::random_unit(gen, 6));
    CHECK(instance_loss_track(extended) > base);

    // A negative at dot -> -inf contributes exp(-inf) = 0 and changes
    // nothing.
    auto saturated = inst;
    std::vector<double> far = inst.anchor;
    for (double& x : far) x *= -1e6;
    saturated.negatives.push_back(std::move(far));
    CHECK(instance_loss_track(saturated) == base);
  }
}

TEST_CASE("loss_aux fixtures and scale invariance") {
  AuxPair same{{0.5, 0.5}, {0.5, 0.5}, true};
  CHECK(loss_aux({same}) == doctest::Approx(0.0));

  AuxPair ortho_diff{{1.0, 0.0}, {0.0, 1.0}, false};
  CHECK(loss_aux({ortho_diff}) == doctest::Approx(0.0));

  AuxPair ortho_same{{1.0, 0.0}, {0.0, 1.0}, true};
  CHECK(loss_aux({ortho_same}) == doctest::Approx(1.0));

  CHECK(loss_aux({same, ortho_same}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(loss_aux({}), InputError);

  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int i = 0; i < 50; ++i) {
    AuxPair pair{testing::random_unit(gen, 4), testing::random_unit(gen, 4),
                 i % 2 == 0};
    const double base = loss_aux({pair});
    AuxPair scaled = pair;
    const double c = scale(gen);
    for (double& x : scaled.a) x *= c;
    CHECK(loss_aux({scaled}) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("finite differences agree with a quadratic") {
  const std::vector<double> point{1.0, 2.0};
  const std::vector<double> grad{2.0, 4.0};
  const double err = finite_diff_check(
      [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return s;
      },
      point, grad, 1e-4);
  CHECK(err < 1e-8);
}

TEST_CASE("grad_loss_track is exact") {
  SUBCASE("single positive, no negatives: all gradients vanish") {
    const auto grads = grad_loss_track(axis_instance({{0.3, -0.8}}, {}));
    for (double g : grads.anchor) CHECK(g == 0.0);
    for (double g : grads.positives[0]) CHECK(g == 0.0);
  }

  SUBCASE("random instances match central differences") {
    std::mt19937_64 gen(27);
    for (int i = 0; i < 50; ++i) {
      const auto inst = random_instance(gen, 4, 2, 3);
      CHECK(check_loss_track_gradients(inst, 1e-4) < 1e-5);
    }
  }

  SUBCASE("directional derivative along the anchor") {
    std::mt19937_64 gen(31);
    const auto inst = random_instance(gen, 4, 2, 3);
    const auto grads = grad_loss_track(inst);
    const double eps = 1e-6;
    auto bumped = inst;
    auto dropped = inst;
    for (std::size_t k = 0; k < inst.anchor.size(); ++k) {
      bumped.anchor[k] *= 1.0 + eps;
      dropped.anchor[k] *= 1.0 - eps;
    }
    const double fd =
        (instance_loss_track(bumped) - instance_loss_track(dropped)) / 2.0;
    double directional = 0.0;
    for (std::size_t k = 0; k < inst.anchor.size(); ++k) {
      directional += grads.anchor[k] * eps * inst.anchor[k];
    }
    CHECK(fd == doctest::Approx(directional).epsilon(1e-4));
  }
}

TEST_CASE("grad_loss_aux matches central differences") {
  std::mt19937_64 gen(37);
  for (int i = 0; i < 50; ++i) {
    AuxPair pair;
    pair.a = testing::random_unit(gen, 4);
    pair.b = testing::random_unit(gen, 4);
    for (double& x : pair.a) x *= 1.5;
    pair.same_identity = i % 2 == 0;
    CHECK(check_loss_aux_gradients(pair, 1e-4) < 1e-6);
  }
}

TEST_CASE("default loss weights") {
  const LossWeights weights;
  CHECK(weights.w_track == 0.25);
  CHECK(weights.w_aux == 1.0);
}
