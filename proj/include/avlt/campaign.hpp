#pragma once

#include "avlt/attacks.hpp"
#include "avlt/targets.hpp"

#include <functional>
#include <string>
#include <vector>

namespace avlt {

enum class AttackMethod { Ours, CW };

AttackMethod attack_method_from_string(const std::string& name);
std::string to_string(AttackMethod method);

struct CampaignRecord {
  int index = 0;
  int target_answer = 0;
  bool success = false;
  double adversarial_probability = 0.0;
  int iterations_used = 0;
  double final_rmse = 0.0;
  bool theorem2_ok = true;
};

struct CampaignSummary {
  double success_rate = 0.0;
  std::vector<double> probabilities;       // per triple, in index order
  std::vector<CdfPoint> cdf;
  std::vector<CampaignRecord> records;
  std::vector<Image> images;               // adversarial images, in index order
};

// Runs one attack per triple, seeding each from (seed, triple index) so the
// outcome is independent of worker count and scheduling.
CampaignSummary run_vqa_campaign(const VqaVictim& model, const TargetSet& targets,
                                 const AttackConfig& cfg, const CwConfig& cw_cfg,
                                 AttackMethod method, std::uint64_t seed, int workers);

struct CaptionRecord {
  int index = 0;
  bool success = false;
  double adversarial_probability = 0.0;
  int iterations_used = 0;
  double final_rmse = 0.0;
  std::string target_text;
  std::vector<std::string> decoded_texts;  // all 5 regions, confidence order
};

struct CaptionCampaignSummary {
  double success_rate = 0.0;  // top-1 exact match
  std::vector<CaptionRecord> records;
};

CaptionCampaignSummary run_caption_campaign(const DenseCapVictim& model,
                                            const std::vector<CaptionTarget>& targets,
                                            const AttackConfig& cfg, std::uint64_t seed,
                                            int workers);

// Order-preserving parallel loop over [0, n).
void parallel_for(int n, int workers, const std::function<void(int)>& body);

}  // namespace avlt
