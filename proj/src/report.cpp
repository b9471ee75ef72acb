#include "avlt/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

namespace avlt {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string cdf_csv(const std::vector<CdfPoint>& points) {
  std::string out = "value,cumulative_fraction\n";
  for (const auto& p : points) {
    out += format_double(p.value);
    out += ',';
    out += format_double(p.fraction);
    out += '\n';
  }
  return out;
}

}  // namespace

std::string hash_bytes(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double mean(const std::vector<double>& values) {
  if (values.empty()) throw InvalidArgument("mean: empty input");
  return std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

void emit_report(const CampaignSummary& campaign, const std::string& out_dir,
                 const std::string& config_hash) {
  json summary;
  summary["success_rate"] = campaign.success_rate;
  summary["mean_adversarial_probability"] = mean(campaign.probabilities);
  summary["median_adversarial_probability"] = median(campaign.probabilities);
  summary["triples"] = campaign.records.size();
  summary["config_hash"] = config_hash;
  write_text_file(out_dir + "/summary.json", summary.dump(2) + "\n");

  write_text_file(out_dir + "/cdf.csv", cdf_csv(campaign.cdf));

  json per_triple = json::array();
  for (const auto& r : campaign.records) {
    per_triple.push_back({{"index", r.index},
                          {"target_answer", r.target_answer},
                          {"success", r.success},
                          {"adversarial_probability", r.adversarial_probability},
                          {"iterations_used", r.iterations_used},
                          {"final_rmse", r.final_rmse},
                          {"theorem2_ok", r.theorem2_ok}});
  }
  write_text_file(out_dir + "/per_triple.json", per_triple.dump(2) + "\n");
}

void emit_caption_report(const CaptionCampaignSummary& campaign, const std::string& out_dir,
                         const std::string& config_hash) {
  // Acc tables over K = 1..5 for each matching metric.
  const std::vector<std::pair<std::string, MatchConfig>> metrics = {
      {"exact", {MatchMetric::ExactMatch}},
      {"meteor_0.15", {MatchMetric::MeteorAbove, 0.15}},
      {"meteor_0.20", {MatchMetric::MeteorAbove, 0.20}},
      {"meteor_0.25", {MatchMetric::MeteorAbove, 0.25}},
  };
  json acc_tables;
  int failures = 0;
  for (const auto& [name, cfg] : metrics) {
    json row = json::array();
    for (int k = 1; k <= kNumRegions; ++k) {
      double total = 0.0;
      for (const auto& r : campaign.records) {
        total += topk_caption_accuracy(r.target_text, r.decoded_texts, k, cfg).accuracy;
      }
      row.push_back(total / double(campaign.records.size()));
    }
    acc_tables[name] = std::move(row);
  }
  for (const auto& r : campaign.records) {
    MatchConfig probe{MatchMetric::MeteorAbove, 0.15};
    if (topk_caption_accuracy(r.target_text, r.decoded_texts, kNumRegions, probe).failure) {
      ++failures;
    }
  }

  json summary;
  summary["success_rate"] = campaign.success_rate;
  summary["pairs"] = campaign.records.size();
  summary["acc_topk"] = std::move(acc_tables);
  summary["failure_rate_meteor_0.15"] =
      double(failures) / double(campaign.records.size());
  summary["config_hash"] = config_hash;
  write_text_file(out_dir + "/summary.json", summary.dump(2) + "\n");

  json per_pair = json::array();
  for (const auto& r : campaign.records) {
    per_pair.push_back({{"index", r.index},
                        {"success", r.success},
                        {"adversarial_probability", r.adversarial_probability},
                        {"iterations_used", r.iterations_used},
                        {"final_rmse", r.final_rmse},
                        {"target", r.target_text},
                        {"decoded", r.decoded_texts}});
  }
  write_text_file(out_dir + "/per_triple.json", per_pair.dump(2) + "\n");
}

void emit_prior_csv(const FrequencyTable& freq, const std::vector<double>& adv_probs,
                    const std::string& path) {
  if (freq.counts.size() != adv_probs.size()) {
    throw InvalidArgument("emit_prior_csv: size mismatch");
  }
  const auto rank_of = [](const std::vector<double>& vals) {
    std::vector<std::size_t> order(vals.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    std::vector<int> rank(vals.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i + 1);
    return rank;
  };
  std::vector<double> fvals(freq.counts.begin(), freq.counts.end());
  const auto frank = rank_of(fvals);
  const auto prank = rank_of(adv_probs);

  std::string out = "answer,frequency,adversarial_probability,frequency_rank,probability_rank\n";
  for (std::size_t a = 0; a < adv_probs.size(); ++a) {
    out += answer_name(static_cast<int>(a)) + "," + std::to_string(freq.counts[a]) + "," +
           format_double(adv_probs[a]) + "," + std::to_string(frank[a]) + "," +
           std::to_string(prank[a]) + "\n";
  }
  write_text_file(path, out);
}

}  // namespace avlt
