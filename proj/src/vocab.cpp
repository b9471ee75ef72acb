#include "avlt/vocab.hpp"

#include <algorithm>

namespace avlt {

namespace {

const std::vector<std::string> kColorNames = {"red", "green", "blue", "yellow"};
const std::vector<std::string> kShapeNames = {"circle", "square", "triangle"};
const std::vector<std::string> kPositionNames = {"left", "right", "top", "bottom", "center"};
const std::vector<std::string> kCategoryNames = {"color", "shape", "count", "existence",
                                                 "position"};

const std::vector<std::string> kAnswerNames = {
    "red", "green", "blue",   "yellow", "circle", "square", "triangle", "1",     "2",
    "3",   "yes",   "no",     "left",   "right",  "top",    "bottom",   "center"};

// Question token table. Templates index into this list.
const std::vector<std::string> kQuestionTokens = {
    "what", "color", "is",     "the",    "shape",  "of",     "object",   "how", "many",
    "objects", "there", "a",   "where",  "red",    "green",  "blue",     "yellow",
    "circle",  "square", "triangle"};

constexpr int kTokColorWordBase = 13;  // red..yellow
constexpr int kTokShapeWordBase = 17;  // circle..triangle

const std::vector<std::string> kCaptionTokens = {
    "<end>", "a",    "red",    "green", "blue",  "yellow", "circle", "square", "triangle",
    "on",    "the",  "left",   "right", "top",   "bottom", "center", "empty",  "gray",
    "region", "scene", "two",  "objects", "one", "three",  "is"};

}  // namespace

const std::string& color_name(Color c) { return kColorNames[static_cast<int>(c)]; }
const std::string& shape_name(Shape s) { return kShapeNames[static_cast<int>(s)]; }
const std::string& position_name(Position p) { return kPositionNames[static_cast<int>(p)]; }
const std::string& category_name(QuestionCategory cat) {
  return kCategoryNames[static_cast<int>(cat)];
}

int answer_of_color(Color c) { return static_cast<int>(c); }
int answer_of_shape(Shape s) { return 4 + static_cast<int>(s); }
int answer_of_count(int n) {
  if (n < 1 || n > kMaxObjects) throw InvalidArgument("answer_of_count: count out of range");
  return 6 + n;
}
int answer_yes() { return 10; }
int answer_no() { return 11; }
int answer_of_position(Position p) { return 12 + static_cast<int>(p); }

const std::string& answer_name(int answer) {
  if (answer < 0 || answer >= kNumAnswers) throw InvalidArgument("answer index out of range");
  return kAnswerNames[answer];
}

QuestionCategory answer_category(int answer) {
  if (answer < 0 || answer >= kNumAnswers) throw InvalidArgument("answer index out of range");
  if (answer < 4) return QuestionCategory::Color;
  if (answer < 7) return QuestionCategory::Shape;
  if (answer < 10) return QuestionCategory::Count;
  if (answer < 12) return QuestionCategory::Existence;
  return QuestionCategory::Position;
}

std::vector<int> answers_in_category(QuestionCategory cat) {
  std::vector<int> out;
  for (int a = 0; a < kNumAnswers; ++a) {
    if (answer_category(a) == cat) out.push_back(a);
  }
  return out;
}

int question_vocab_size() { return static_cast<int>(kQuestionTokens.size()); }

const std::string& question_token(int id) {
  if (id < 0 || id >= question_vocab_size()) {
    throw InvalidArgument("question token id out of range");
  }
  return kQuestionTokens[id];
}

std::string question_text(const Question& q) {
  std::string text;
  for (int id : q.token_ids) {
    if (!text.empty()) text += ' ';
    text += question_token(id);
  }
  return text;
}

Question make_color_question(Shape s) {
  return {{0, 1, 2, 3, kTokShapeWordBase + static_cast<int>(s)}, QuestionCategory::Color};
}

Question make_shape_question(Color c) {
  return {{0, 4, 2, 3, kTokColorWordBase + static_cast<int>(c), 6}, QuestionCategory::Shape};
}

Question make_count_question() { return {{7, 8, 9}, QuestionCategory::Count}; }

Question make_existence_question(Color c, Shape s) {
  return {{2, 10, 11, kTokColorWordBase + static_cast<int>(c),
           kTokShapeWordBase + static_cast<int>(s)},
          QuestionCategory::Existence};
}

Question make_position_question(Shape s) {
  return {{12, 2, 3, kTokShapeWordBase + static_cast<int>(s)}, QuestionCategory::Position};
}

const std::string& caption_token(int id) {
  if (id < 0 || id >= kCaptionVocab) throw InvalidArgument("caption token id out of range");
  return kCaptionTokens[id];
}

int caption_token_id(const std::string& word) {
  auto it = std::find(kCaptionTokens.begin(), kCaptionTokens.end(), word);
  if (it == kCaptionTokens.end()) throw InvalidArgument("unknown caption word: " + word);
  return static_cast<int>(it - kCaptionTokens.begin());
}

std::string caption_text(const Caption& c) {
  std::string text;
  for (int id : c.token_ids) {
    if (id == kCaptionEnd) break;
    if (!text.empty()) text += ' ';
    text += caption_token(id);
  }
  return text;
}

Caption caption_from_words(const std::vector<std::string>& words) {
  Caption c;
  for (const auto& w : words) c.token_ids.push_back(caption_token_id(w));
  c.token_ids.push_back(kCaptionEnd);
  validate_caption(c);
  return c;
}

void validate_caption(const Caption& c) {
  if (c.token_ids.empty()) throw InvalidArgument("caption must be non-empty");
  if (c.token_ids.size() > kCaptionMaxLen) throw InvalidArgument("caption exceeds max length");
  for (std::size_t i = 0; i < c.token_ids.size(); ++i) {
    const int id = c.token_ids[i];
    if (id < 0 || id >= kCaptionVocab) throw InvalidArgument("caption token id out of range");
    if (id == kCaptionEnd && i + 1 != c.token_ids.size()) {
      throw InvalidArgument("end token only allowed in final position");
    }
  }
}

}  // namespace avlt
