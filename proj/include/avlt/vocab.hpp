#pragma once

#include "avlt/core.hpp"

#include <array>
#include <string>
#include <vector>

namespace avlt {

// ---- scene attributes ------------------------------------------------------

enum class Color { Red, Green, Blue, Yellow };
enum class Shape { Circle, Square, Triangle };
enum class Position { Left, Right, Top, Bottom, Center };

inline constexpr int kNumColors = 4;
inline constexpr int kNumShapes = 3;
inline constexpr int kNumPositions = 5;
inline constexpr int kMaxObjects = 3;

const std::string& color_name(Color c);
const std::string& shape_name(Shape s);
const std::string& position_name(Position p);

// ---- answers ---------------------------------------------------------------

// Answer vocabulary, K = 17:
//   0..3  colors, 4..6 shapes, 7..9 counts 1..3, 10 yes, 11 no, 12..16 positions.
inline constexpr int kNumAnswers = 17;

enum class QuestionCategory { Color, Shape, Count, Existence, Position };
inline constexpr int kNumCategories = 5;

int answer_of_color(Color c);
int answer_of_shape(Shape s);
int answer_of_count(int n);  // n in 1..3
int answer_yes();
int answer_no();
int answer_of_position(Position p);

const std::string& answer_name(int answer);
QuestionCategory answer_category(int answer);
std::vector<int> answers_in_category(QuestionCategory cat);

const std::string& category_name(QuestionCategory cat);

// ---- questions -------------------------------------------------------------

struct Question {
  std::vector<int> token_ids;
  QuestionCategory template_category = QuestionCategory::Count;

  bool operator==(const Question& other) const = default;
};

int question_vocab_size();
const std::string& question_token(int id);
std::string question_text(const Question& q);

Question make_color_question(Shape s);        // "what color is the <shape>"
Question make_shape_question(Color c);        // "what shape is the <color> object"
Question make_count_question();               // "how many objects"
Question make_existence_question(Color c, Shape s);  // "is there a <color> <shape>"
Question make_position_question(Shape s);     // "where is the <shape>"

// ---- captions --------------------------------------------------------------

// Caption vocabulary, V = 25, token 0 is the end-of-caption marker.
inline constexpr int kCaptionVocab = 25;
inline constexpr int kCaptionEnd = 0;
inline constexpr int kCaptionMaxLen = 6;

struct Caption {
  std::vector<int> token_ids;  // end token appears at most once and only last

  bool operator==(const Caption& other) const = default;
};

const std::string& caption_token(int id);
int caption_token_id(const std::string& word);  // throws on unknown word
std::string caption_text(const Caption& c);     // end token omitted from text
Caption caption_from_words(const std::vector<std::string>& words);  // appends end

void validate_caption(const Caption& c);

}  // namespace avlt
