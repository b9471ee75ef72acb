#pragma once

#include "avlt/core.hpp"
#include "avlt/scenes.hpp"
#include "avlt/vocab.hpp"
#include "avlt/vqa.hpp"

#include <string>
#include <vector>

namespace avlt {

enum class TargetKind { PopularQA, RareQA, Gold, NonSense };

TargetKind target_kind_from_string(const std::string& name);
std::string to_string(TargetKind kind);

struct QATriple {
  int image_id = 0;  // index into the source-image list
  SceneSpec scene;
  Question question;
  int target_answer = 0;
};

struct TargetSet {
  TargetKind kind = TargetKind::Gold;
  std::vector<QATriple> triples;
};

struct CaptionTarget {
  SceneSpec scene;
  Caption caption;
};

// Toy-scale construction constants.
inline constexpr int kTargetQuestions = 20;   // P question templates
inline constexpr int kSourceImages = 5;       // popular/rare source images
inline constexpr int kGoldSize = 100;
inline constexpr int kNonSenseSize = 100;

// Builds the requested target set from corpus statistics (popular/rare),
// victim agreement (gold), or cross-category sampling (non-sense).
// Deterministic in (kind, corpus, victims, seed).
TargetSet build_target_set(TargetKind kind, const Corpus& corpus,
                           const std::vector<const VqaVictim*>& victims, std::uint64_t seed);

// Target captions paired with source scenes for the caption attack campaign.
std::vector<CaptionTarget> build_caption_targets(const Corpus& corpus, int n_scenes);

// ---- answer-frequency prior study ------------------------------------------

struct FrequencyTable {
  std::vector<int> counts;  // one per answer; sums to the probe-set size

  int total() const;
};

FrequencyTable answer_frequency(const VqaVictim& model, const std::vector<Image>& probes,
                                const Question& question);

// Spearman rank correlation between per-answer frequency and per-answer
// adversarial probability.
double prior_correlation(const FrequencyTable& freq, const std::vector<double>& adv_probs);

// ---- transfer study --------------------------------------------------------

struct TransferReport {
  int successes_on_a = 0;    // denominator: targeted successes on the source model
  int transferred = 0;       // model B also predicts the target
  double rate = 0.0;
};

// Targeted transfer: among adversarial images successful on model A, the
// fraction for which model B also predicts the target answer.
TransferReport transfer_rate(const std::vector<QATriple>& triples,
                             const std::vector<bool>& success_on_a,
                             const std::vector<Image>& adversarial_images,
                             const VqaVictim& model_b);

// ---- serialization ---------------------------------------------------------

std::string target_set_to_json(const TargetSet& set);
TargetSet target_set_from_json(const std::string& json_text);

}  // namespace avlt
