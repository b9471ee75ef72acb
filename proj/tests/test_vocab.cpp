#include "avlt/vocab.hpp"

#include <doctest.h>

#include <set>

using namespace avlt;

TEST_CASE("answer indices follow the fixed layout") {
  CHECK(answer_of_color(Color::Red) == 0);
  CHECK(answer_of_color(Color::Yellow) == 3);
  CHECK(answer_of_shape(Shape::Circle) == 4);
  CHECK(answer_of_shape(Shape::Triangle) == 6);
  CHECK(answer_of_count(1) == 7);
  CHECK(answer_of_count(3) == 9);
  CHECK(answer_yes() == 10);
  CHECK(answer_no() == 11);
  CHECK(answer_of_position(Position::Left) == 12);
  CHECK(answer_of_position(Position::Center) == 16);
}

TEST_CASE("answer categories partition the 17 answers") {
  int counts[kNumCategories] = {0, 0, 0, 0, 0};
  for (int a = 0; a < kNumAnswers; ++a) ++counts[static_cast<int>(answer_category(a))];
  CHECK(counts[static_cast<int>(QuestionCategory::Color)] == 4);
  CHECK(counts[static_cast<int>(QuestionCategory::Shape)] == 3);
  CHECK(counts[static_cast<int>(QuestionCategory::Count)] == 3);
  CHECK(counts[static_cast<int>(QuestionCategory::Existence)] == 2);
  CHECK(counts[static_cast<int>(QuestionCategory::Position)] == 5);

  for (int c = 0; c < kNumCategories; ++c) {
    const auto cat = static_cast<QuestionCategory>(c);
    for (int a : answers_in_category(cat)) CHECK(answer_category(a) == cat);
  }
}

TEST_CASE("answer names are unique") {
  std::set<std::string> names;
  for (int a = 0; a < kNumAnswers; ++a) names.insert(answer_name(a));
  CHECK(names.size() == kNumAnswers);
}

TEST_CASE("question templates render the expected text") {
  CHECK(question_text(make_color_question(Shape::Circle)) == "what color is the circle");
  CHECK(question_text(make_shape_question(Color::Blue)) == "what shape is the blue object");
  CHECK(question_text(make_count_question()) == "how many objects");
  CHECK(question_text(make_existence_question(Color::Red, Shape::Square)) ==
        "is there a red square");
  CHECK(question_text(make_position_question(Shape::Triangle)) == "where is the triangle");
  CHECK(make_count_question().template_category == QuestionCategory::Count);
  CHECK(make_position_question(Shape::Circle).template_category == QuestionCategory::Position);
}

TEST_CASE("question token ids stay inside the vocabulary") {
  for (const Question& q :
       {make_color_question(Shape::Triangle), make_shape_question(Color::Yellow),
        make_count_question(), make_existence_question(Color::Green, Shape::Circle),
        make_position_question(Shape::Square)}) {
    for (int id : q.token_ids) {
      CHECK(id >= 0);
      CHECK(id < question_vocab_size());
    }
  }
}

TEST_CASE("caption vocabulary has 25 unique tokens with end at index 0") {
  std::set<std::string> tokens;
  for (int i = 0; i < kCaptionVocab; ++i) tokens.insert(caption_token(i));
  CHECK(tokens.size() == kCaptionVocab);
  CHECK(caption_token_id(caption_token(5)) == 5);
  CHECK_THROWS_AS(caption_token_id("zebra"), InvalidArgument);
}

TEST_CASE("caption_from_words appends the end marker") {
  const Caption c = caption_from_words({"a", "red", "circle"});
  REQUIRE(c.token_ids.size() == 4);
  CHECK(c.token_ids.back() == kCaptionEnd);
  CHECK(caption_text(c) == "a red circle");
  CHECK_NOTHROW(validate_caption(c));
}

TEST_CASE("validate_caption rejects malformed sequences") {
  Caption mid_end;
  mid_end.token_ids = {1, kCaptionEnd, 2};
  CHECK_THROWS_AS(validate_caption(mid_end), InvalidArgument);

  Caption bad_id;
  bad_id.token_ids = {1, kCaptionVocab};
  CHECK_THROWS_AS(validate_caption(bad_id), InvalidArgument);

  Caption too_long;
  too_long.token_ids = {1, 2, 3, 4, 5, 6, 7};
  CHECK_THROWS_AS(validate_caption(too_long), InvalidArgument);

  Caption empty;
  CHECK_THROWS_AS(validate_caption(empty), InvalidArgument);
}
