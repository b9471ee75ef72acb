#include "avlt/vqa.hpp"

#include "avlt/gradcheck.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

using namespace avlt;

namespace {

Image random_image(std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 255.0);
  Image x = make_image();
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = uni(rng);
  return x;
}

double ce_loss(const VqaVictim& model, const Image& x, const Question& q, int target) {
  return -std::log(std::max(vqa_forward(model, x, q).probs[target], 1e-12));
}

}  // namespace

TEST_CASE("softmax output is a probability simplex for both variants") {
  for (auto variant : {VqaVariant::Monolithic, VqaVariant::Attentive}) {
    const VqaVictim model = make_vqa_victim(variant, 21);
    for (int trial = 0; trial < 50; ++trial) {
      const Image x = random_image(100 + trial);
      const Question q = make_count_question();
      const auto acts = vqa_forward(model, x, q);
      CHECK(acts.probs.size() == kNumAnswers);
      CHECK(acts.probs.minCoeff() >= 0.0);
      CHECK(acts.probs.sum() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK_NOTHROW(validate_probs(acts.probs));
    }
  }
}

TEST_CASE("attention weights form a distribution over the 16 patches") {
  const VqaVictim model = make_vqa_victim(VqaVariant::Attentive, 5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto [probs, att] = forward_vqa(model, random_image(trial), make_count_question());
    REQUIRE(att.has_value());
    CHECK(att->size() == kFeatureGrid * kFeatureGrid);
    CHECK(att->minCoeff() >= 0.0);
    CHECK(att->sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
  const auto [probs, att] =
      forward_vqa(make_vqa_victim(VqaVariant::Monolithic, 5), random_image(0),
                  make_count_question());
  CHECK_FALSE(att.has_value());
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  Eigen::VectorXd v(4);
  v << 1.0, 3.0, 3.0, 2.0;
  CHECK(argmax_lowest(v) == 1);
  v << 5.0, 5.0, 5.0, 5.0;
  CHECK(argmax_lowest(v) == 0);
}

TEST_CASE("analytic pixel gradients match finite differences") {
  const Question q = make_existence_question(Color::Blue, Shape::Square);
  for (auto variant : {VqaVariant::Monolithic, VqaVariant::Attentive}) {
    const VqaVictim model = make_vqa_victim(variant, 77);
    const Image x = random_image(200);
    const int target = answer_yes();

    const ProbObjective obj = [&](const Probs& p) {
      Eigen::VectorXd dp = Eigen::VectorXd::Zero(kNumAnswers);
      dp[target] = -1.0 / std::max(p[target], 1e-12);
      return std::make_pair(-std::log(std::max(p[target], 1e-12)), dp);
    };
    const auto [loss, grad] = vqa_loss_grad(model, x, q, obj);
    CHECK(std::isfinite(loss));

    const ScalarFn f = [&](const Eigen::ArrayXd& xx) { return ce_loss(model, xx, q, target); };
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> coord(0, kImagePixels - 1);
    for (int probe = 0; probe < 25; ++probe) {
      const int i = coord(rng);
      CHECK(grad_close(grad[i], finite_diff_partial(f, x, i)));
    }
  }
}

TEST_CASE("analytic parameter gradients match finite differences") {
  const Question q = make_color_question(Shape::Circle);
  const int target = answer_of_color(Color::Green);
  for (auto variant : {VqaVariant::Monolithic, VqaVariant::Attentive}) {
    const VqaVictim model = make_vqa_victim(variant, 13);
    const Image x = random_image(300);

    const auto acts = vqa_forward(model, x, q);
    Eigen::VectorXd dprobs = Eigen::VectorXd::Zero(kNumAnswers);
    dprobs[target] = -1.0 / std::max(acts.probs[target], 1e-12);
    ParamStore grads = model.params.zeros_like();
    vqa_backward(model, acts, q, softmax_pullback(acts.probs, dprobs), nullptr, &grads);

    std::mt19937_64 rng(7);
    for (const auto& [name, value] : model.params) {
      if (name == "meta_variant") continue;
      std::uniform_int_distribution<int> ri(0, static_cast<int>(value.rows()) - 1);
      std::uniform_int_distribution<int> ci(0, static_cast<int>(value.cols()) - 1);
      for (int probe = 0; probe < 3; ++probe) {
        const int r = ri(rng), c = ci(rng);
        VqaVictim perturbed = model;
        auto eval = [&](double h) {
          perturbed.params.at(name)(r, c) = value(r, c) + h;
          return ce_loss(perturbed, x, q, target);
        };
        const double numeric = (eval(kGradCheckStep) - eval(-kGradCheckStep)) /
                               (2.0 * kGradCheckStep);
        CHECK(grad_close(grads.at(name)(r, c), numeric));
      }
    }
  }
}

TEST_CASE("vqa checkpoints round-trip including the variant tag") {
  for (auto variant : {VqaVariant::Monolithic, VqaVariant::Attentive}) {
    const VqaVictim model = make_vqa_victim(variant, 99);
    const std::string path =
        (std::filesystem::temp_directory_path() / "avlt_test_vqa.bin").string();
    save_vqa(model, path);
    const VqaVictim back = load_vqa(path);
    std::remove(path.c_str());
    CHECK(back.variant == variant);
    const Image x = random_image(1);
    const Question q = make_count_question();
    CHECK((vqa_forward(back, x, q).probs - vqa_forward(model, x, q).probs).norm() == 0.0);
  }
}

TEST_CASE("forward pass is deterministic") {
  const VqaVictim model = make_vqa_victim(VqaVariant::Attentive, 3);
  const Image x = random_image(17);
  const Question q = make_position_question(Shape::Square);
  CHECK((vqa_forward(model, x, q).probs - vqa_forward(model, x, q).probs).norm() == 0.0);
  CHECK(predict_answer(model, x, q) == argmax_lowest(vqa_forward(model, x, q).probs));
}
