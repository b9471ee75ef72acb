#include "avlt/targets.hpp"

#include "avlt/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <numeric>

namespace avlt {

namespace {

using QuestionKey = std::vector<int>;

struct QuestionStats {
  Question question;
  long total = 0;
  std::map<int, long> answer_counts;
};

// Per-question answer statistics over the training split, after removing
// answers that appear fewer than 3 times corpus-wide.
std::vector<QuestionStats> filtered_question_stats(const Corpus& corpus) {
  std::map<int, long> global_answer_counts;
  for (const auto& s : corpus.train) ++global_answer_counts[s.answer];

  std::map<QuestionKey, QuestionStats> by_question;
  for (const auto& s : corpus.train) {
    if (global_answer_counts[s.answer] < 3) continue;
    auto& st = by_question[s.question.token_ids];
    st.question = s.question;
    ++st.total;
    ++st.answer_counts[s.answer];
  }

  std::vector<QuestionStats> out;
  for (auto& [key, st] : by_question) {
    if (st.answer_counts.size() >= 3) out.push_back(std::move(st));
  }
  return out;
}

std::vector<int> top_answers(const QuestionStats& st, bool most_frequent) {
  std::vector<std::pair<int, long>> items(st.answer_counts.begin(), st.answer_counts.end());
  std::stable_sort(items.begin(), items.end(), [&](const auto& a, const auto& b) {
    return most_frequent ? a.second > b.second : a.second < b.second;
  });
  std::vector<int> out;
  for (int i = 0; i < 3 && i < static_cast<int>(items.size()); ++i) {
    out.push_back(items[i].first);
  }
  return out;
}

template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (int i = static_cast<int>(items.size()) - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(items[i], items[pick(rng)]);
  }
}

}  // namespace

TargetKind target_kind_from_string(const std::string& name) {
  if (name == "popular") return TargetKind::PopularQA;
  if (name == "rare") return TargetKind::RareQA;
  if (name == "gold") return TargetKind::Gold;
  if (name == "nonsense") return TargetKind::NonSense;
  throw InvalidArgument("unknown target kind: " + name);
}

std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::PopularQA: return "popular";
    case TargetKind::RareQA: return "rare";
    case TargetKind::Gold: return "gold";
    case TargetKind::NonSense: return "nonsense";
  }
  return "?";
}

TargetSet build_target_set(TargetKind kind, const Corpus& corpus,
                           const std::vector<const VqaVictim*>& victims, std::uint64_t seed) {
  if (corpus.val_scenes.size() < kSourceImages) {
    throw ConstructionError("build_target_set: need at least 5 validation scenes");
  }
  TargetSet set;
  set.kind = kind;
  auto rng = make_rng(mix_seed(seed, 0x746172676574));

  if (kind == TargetKind::PopularQA || kind == TargetKind::RareQA) {
    const bool popular = kind == TargetKind::PopularQA;
    auto stats = filtered_question_stats(corpus);
    std::stable_sort(stats.begin(), stats.end(), [&](const auto& a, const auto& b) {
      if (a.total != b.total) return popular ? a.total > b.total : a.total < b.total;
      return a.question.token_ids < b.question.token_ids;
    });
    const int n_questions = std::min<int>(kTargetQuestions, static_cast<int>(stats.size()));
    for (int qi = 0; qi < n_questions; ++qi) {
      for (int answer : top_answers(stats[qi], popular)) {
        for (int img = 0; img < kSourceImages; ++img) {
          set.triples.push_back(
              {img, corpus.val_scenes[img], stats[qi].question, answer});
        }
      }
    }
    return set;
  }

  // Gold and NonSense draw from well-posed validation samples.
  std::vector<int> order(corpus.val.size());
  std::iota(order.begin(), order.end(), 0);
  seeded_shuffle(order, rng);

  if (kind == TargetKind::Gold) {
    for (int idx : order) {
      if (static_cast<int>(set.triples.size()) >= kGoldSize) break;
      const auto& sample = corpus.val[idx];
      const Image image = render_scene(sample.scene);
      const bool all_correct =
          std::all_of(victims.begin(), victims.end(), [&](const VqaVictim* v) {
            return predict_answer(*v, image, sample.question) == sample.answer;
          });
      if (!all_correct) continue;
      auto candidates = answers_in_category(sample.question.template_category);
      std::erase(candidates, sample.answer);
      if (candidates.empty()) continue;
      std::uniform_int_distribution<int> pick(0, static_cast<int>(candidates.size()) - 1);
      set.triples.push_back({idx, sample.scene, sample.question, candidates[pick(rng)]});
    }
    if (static_cast<int>(set.triples.size()) < kGoldSize) {
      throw ConstructionError("gold construction: only " +
                              std::to_string(set.triples.size()) + " of " +
                              std::to_string(kGoldSize) + " correct-answer triples found");
    }
    return set;
  }

  // NonSense: the target answer category contradicts the question category.
  for (int idx : order) {
    if (static_cast<int>(set.triples.size()) >= kNonSenseSize) break;
    const auto& sample = corpus.val[idx];
    std::vector<int> candidates;
    for (int a = 0; a < kNumAnswers; ++a) {
      if (answer_category(a) != sample.question.template_category) candidates.push_back(a);
    }
    std::uniform_int_distribution<int> pick(0, static_cast<int>(candidates.size()) - 1);
    set.triples.push_back({idx, sample.scene, sample.question, candidates[pick(rng)]});
  }
  if (static_cast<int>(set.triples.size()) < kNonSenseSize) {
    throw ConstructionError("nonsense construction: not enough validation samples");
  }
  return set;
}

std::vector<CaptionTarget> build_caption_targets(const Corpus& corpus, int n_scenes) {
  if (n_scenes <= 0 || n_scenes > static_cast<int>(corpus.val_scenes.size())) {
    throw InvalidArgument("build_caption_targets: scene count out of range");
  }
  const std::vector<Caption> targets = {
      caption_from_words({"a", "red", "circle"}),
      caption_from_words({"a", "blue", "square"}),
      caption_from_words({"a", "yellow", "triangle"}),
      caption_from_words({"two", "objects"}),
      caption_from_words({"empty", "gray", "region"}),
  };
  std::vector<CaptionTarget> out;
  for (int i = 0; i < n_scenes; ++i) {
    for (const auto& c : targets) out.push_back({corpus.val_scenes[i], c});
  }
  return out;
}

int FrequencyTable::total() const {
  return static_cast<int>(std::accumulate(counts.begin(), counts.end(), 0L));
}

FrequencyTable answer_frequency(const VqaVictim& model, const std::vector<Image>& probes,
                                const Question& question) {
  if (probes.empty()) throw InvalidArgument("answer_frequency: empty probe set");
  FrequencyTable table;
  table.counts.assign(kNumAnswers, 0);
  for (const auto& image : probes) {
    ++table.counts[predict_answer(model, image, question)];
  }
  return table;
}

double prior_correlation(const FrequencyTable& freq, const std::vector<double>& adv_probs) {
  if (freq.counts.size() != adv_probs.size()) {
    throw InvalidArgument("prior_correlation: size mismatch");
  }
  std::vector<double> xs(freq.counts.begin(), freq.counts.end());
  return spearman(xs, adv_probs);
}

TransferReport transfer_rate(const std::vector<QATriple>& triples,
                             const std::vector<bool>& success_on_a,
                             const std::vector<Image>& adversarial_images,
                             const VqaVictim& model_b) {
  if (triples.size() != success_on_a.size() || triples.size() != adversarial_images.size()) {
    throw InvalidArgument("transfer_rate: size mismatch");
  }
  TransferReport report;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (!success_on_a[i]) continue;
    ++report.successes_on_a;
    if (predict_answer(model_b, adversarial_images[i], triples[i].question) ==
        triples[i].target_answer) {
      ++report.transferred;
    }
  }
  if (report.successes_on_a == 0) {
    throw InvalidArgument("transfer_rate: no successes on the source model");
  }
  report.rate = double(report.transferred) / double(report.successes_on_a);
  return report;
}

namespace {

using nlohmann::json;

json scene_to_json(const SceneSpec& scene) {
  json objs = json::array();
  for (const auto& o : scene.objects) {
    objs.push_back({{"shape", shape_name(o.shape)},
                    {"color", color_name(o.color)},
                    {"position", position_name(o.position)}});
  }
  return {{"seed", scene.seed}, {"objects", objs}};
}

SceneSpec scene_from_json(const json& j) {
  SceneSpec scene;
  scene.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& o : j.at("objects")) {
    SceneObject obj;
    const std::string shape = o.at("shape"), color = o.at("color"), pos = o.at("position");
    for (int s = 0; s < kNumShapes; ++s) {
      if (shape_name(static_cast<Shape>(s)) == shape) obj.shape = static_cast<Shape>(s);
    }
    for (int c = 0; c < kNumColors; ++c) {
      if (color_name(static_cast<Color>(c)) == color) obj.color = static_cast<Color>(c);
    }
    for (int p = 0; p < kNumPositions; ++p) {
      if (position_name(static_cast<Position>(p)) == pos) obj.position = static_cast<Position>(p);
    }
    scene.objects.push_back(obj);
  }
  validate_scene(scene);
  return scene;
}

}  // namespace

std::string target_set_to_json(const TargetSet& set) {
  json j;
  j["kind"] = to_string(set.kind);
  json triples = json::array();
  for (const auto& t : set.triples) {
    triples.push_back({{"image_id", t.image_id},
                       {"scene", scene_to_json(t.scene)},
                       {"question_tokens", t.question.token_ids},
                       {"question_category", category_name(t.question.template_category)},
                       {"question_text", question_text(t.question)},
                       {"target_answer", t.target_answer},
                       {"target_answer_text", answer_name(t.target_answer)}});
  }
  j["triples"] = std::move(triples);
  return j.dump(2);
}

TargetSet target_set_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  TargetSet set;
  set.kind = target_kind_from_string(j.at("kind"));
  for (const auto& t : j.at("triples")) {
    QATriple triple;
    triple.image_id = t.at("image_id");
    triple.scene = scene_from_json(t.at("scene"));
    triple.question.token_ids = t.at("question_tokens").get<std::vector<int>>();
    const std::string cat = t.at("question_category");
    for (int c = 0; c < kNumCategories; ++c) {
      if (category_name(static_cast<QuestionCategory>(c)) == cat) {
        triple.question.template_category = static_cast<QuestionCategory>(c);
      }
    }
    triple.target_answer = t.at("target_answer");
    set.triples.push_back(std::move(triple));
  }
  return set;
}

}  // namespace avlt
