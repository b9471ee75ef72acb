#include "avlt/scenes.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <set>

using namespace avlt;

namespace {

SceneSpec red_circle_center(std::uint64_t seed = 3) {
  SceneSpec spec;
  spec.seed = seed;
  spec.objects.push_back({Shape::Circle, Color::Red, Position::Center});
  return spec;
}

}  // namespace

TEST_CASE("scene validation enforces object count and distinct positions") {
  SceneSpec empty;
  CHECK_THROWS_AS(validate_scene(empty), InvalidArgument);

  SceneSpec dup = red_circle_center();
  dup.objects.push_back({Shape::Square, Color::Blue, Position::Center});
  CHECK_THROWS_AS(validate_scene(dup), InvalidArgument);

  SceneSpec four = red_circle_center();
  four.objects.push_back({Shape::Square, Color::Blue, Position::Left});
  four.objects.push_back({Shape::Square, Color::Blue, Position::Right});
  four.objects.push_back({Shape::Square, Color::Blue, Position::Top});
  CHECK_THROWS_AS(validate_scene(four), InvalidArgument);
}

TEST_CASE("rendering paints palette colors over a gray background") {
  const Image img = render_scene(red_circle_center());
  int row, col;
  position_center(Position::Center, row, col);
  // Center pixel: pure red plus at most +-5 noise, clipped.
  CHECK(img[pixel_index(row, col, 0)] >= 250.0);
  CHECK(img[pixel_index(row, col, 1)] <= 5.0);
  CHECK(img[pixel_index(row, col, 2)] <= 5.0);
  // A far corner stays near the 128 background.
  for (int ch = 0; ch < 3; ++ch) {
    CHECK(img[pixel_index(0, 0, ch)] >= 123.0);
    CHECK(img[pixel_index(0, 0, ch)] <= 133.0);
  }
  CHECK(img.minCoeff() >= 0.0);
  CHECK(img.maxCoeff() <= 255.0);
}

TEST_CASE("rendering is deterministic in the scene seed") {
  const Image a = render_scene(red_circle_center(5));
  const Image b = render_scene(red_circle_center(5));
  const Image c = render_scene(red_circle_center(6));
  CHECK((a - b).abs().maxCoeff() == 0.0);
  CHECK((a - c).abs().maxCoeff() > 0.0);
}

TEST_CASE("position centers land in the documented quadrants") {
  CHECK(object_quadrant(Position::Left) == 0);
  CHECK(object_quadrant(Position::Top) == 1);
  CHECK(object_quadrant(Position::Bottom) == 2);
  CHECK(object_quadrant(Position::Right) == 3);
  CHECK(object_quadrant(Position::Center) == 3);
}

TEST_CASE("ground-truth answers cover every template") {
  SceneSpec spec = red_circle_center();
  spec.objects.push_back({Shape::Square, Color::Blue, Position::Left});

  CHECK(ground_truth_answer(spec, make_count_question()) == answer_of_count(2));
  CHECK(ground_truth_answer(spec, make_color_question(Shape::Circle)) ==
        answer_of_color(Color::Red));
  CHECK(ground_truth_answer(spec, make_shape_question(Color::Blue)) ==
        answer_of_shape(Shape::Square));
  CHECK(ground_truth_answer(spec, make_position_question(Shape::Square)) ==
        answer_of_position(Position::Left));
  CHECK(ground_truth_answer(spec, make_existence_question(Color::Red, Shape::Circle)) ==
        answer_yes());
  CHECK(ground_truth_answer(spec, make_existence_question(Color::Green, Shape::Triangle)) ==
        answer_no());
}

TEST_CASE("ill-posed questions have no ground truth") {
  SceneSpec spec = red_circle_center();
  spec.objects.push_back({Shape::Circle, Color::Blue, Position::Left});
  // Two circles: color/position of "the circle" is ambiguous.
  CHECK_FALSE(ground_truth_answer(spec, make_color_question(Shape::Circle)).has_value());
  CHECK_FALSE(ground_truth_answer(spec, make_position_question(Shape::Circle)).has_value());
  // No triangle at all.
  CHECK_FALSE(ground_truth_answer(spec, make_color_question(Shape::Triangle)).has_value());
}

TEST_CASE("region ground truth describes quadrant contents") {
  SceneSpec spec = red_circle_center();  // center lives in quadrant 3 (BR)
  CHECK(caption_text(region_ground_truth(spec, 0)) == "empty gray region");
  CHECK(caption_text(region_ground_truth(spec, 3)) == "a red circle");
  CHECK(caption_text(region_ground_truth(spec, 4)) == "a red circle");

  spec.objects.push_back({Shape::Square, Color::Blue, Position::Right});  // also BR
  CHECK(caption_text(region_ground_truth(spec, 3)) == "two objects");
  spec.objects.push_back({Shape::Triangle, Color::Green, Position::Top});
  CHECK(caption_text(region_ground_truth(spec, 4)) == "three objects");
  CHECK_THROWS_AS(region_ground_truth(spec, 5), InvalidArgument);
}

TEST_CASE("generated corpus is well posed, skewed toward yes, and seed-disjoint") {
  const Corpus corpus = generate_dataset(60, 12, 11);
  CHECK(corpus.train_scenes.size() == 60);
  CHECK(corpus.val_scenes.size() == 12);
  CHECK(corpus.train.size() > corpus.train_scenes.size());

  int yes = 0, no = 0;
  for (const auto& s : corpus.train) {
    const auto truth = ground_truth_answer(s.scene, s.question);
    REQUIRE(truth.has_value());
    CHECK(*truth == s.answer);
    if (s.question.template_category == QuestionCategory::Existence) {
      (s.answer == answer_yes() ? yes : no) += 1;
    }
  }
  REQUIRE(yes + no == 60);  // exactly one existence probe per scene
  const double yes_rate = double(yes) / double(yes + no);
  CHECK(yes_rate >= 0.55);
  CHECK(yes_rate <= 0.85);

  // Scene seeds must not collide across splits.
  std::set<std::uint64_t> seeds;
  for (const auto& sc : corpus.train_scenes) seeds.insert(sc.seed);
  for (const auto& sc : corpus.val_scenes) seeds.insert(sc.seed);
  CHECK(seeds.size() == corpus.train_scenes.size() + corpus.val_scenes.size());

  // Regeneration with the same seed is identical; a different seed is not.
  const Corpus again = generate_dataset(60, 12, 11);
  CHECK(again.train_scenes == corpus.train_scenes);
  const Corpus other = generate_dataset(60, 12, 12);
  CHECK(other.train_scenes != corpus.train_scenes);
}

TEST_CASE("ppm round trip preserves pixels up to rounding") {
  const Image img = render_scene(red_circle_center(9));
  const std::string path =
      (std::filesystem::temp_directory_path() / "avlt_test_scene.ppm").string();
  write_ppm(img, path);
  const Image back = read_ppm(path);
  std::remove(path.c_str());
  CHECK((back - img).abs().maxCoeff() <= 0.5);
  CHECK_THROWS_AS(read_ppm("/nonexistent/avlt.ppm"), InvalidArgument);
}
