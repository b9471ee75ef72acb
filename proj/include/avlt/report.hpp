#pragma once

#include "avlt/campaign.hpp"
#include "avlt/metrics.hpp"
#include "avlt/targets.hpp"

#include <string>
#include <vector>

namespace avlt {

// FNV-1a over raw bytes, hex-encoded; used to tie reports to their config.
std::string hash_bytes(const std::string& bytes);

double mean(const std::vector<double>& values);
double median(std::vector<double> values);

// Writes summary.json, cdf.csv, and per_triple.json into out_dir.
void emit_report(const CampaignSummary& campaign, const std::string& out_dir,
                 const std::string& config_hash);

// Caption campaigns additionally get Acc tables over K = 1..5 for the
// exact-match and METEOR>omega metrics.
void emit_caption_report(const CaptionCampaignSummary& campaign, const std::string& out_dir,
                         const std::string& config_hash);

// Prior study series: answer, frequency, adversarial probability, ranks.
void emit_prior_csv(const FrequencyTable& freq, const std::vector<double>& adv_probs,
                    const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace avlt
