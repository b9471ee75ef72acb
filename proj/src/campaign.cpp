#include "avlt/campaign.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

namespace avlt {

AttackMethod attack_method_from_string(const std::string& name) {
  if (name == "ours") return AttackMethod::Ours;
  if (name == "cw") return AttackMethod::CW;
  throw InvalidArgument("unknown attack method: " + name);
}

std::string to_string(AttackMethod method) {
  return method == AttackMethod::Ours ? "ours" : "cw";
}

void parallel_for(int n, int workers, const std::function<void(int)>& body) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int count = std::min(workers, n);
  pool.reserve(count);
  for (int w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

CampaignSummary run_vqa_campaign(const VqaVictim& model, const TargetSet& targets,
                                 const AttackConfig& cfg, const CwConfig& cw_cfg,
                                 AttackMethod method, std::uint64_t seed, int workers) {
  cfg.validate();
  cw_cfg.validate();
  const int n = static_cast<int>(targets.triples.size());
  if (n == 0) throw InvalidArgument("run_vqa_campaign: empty target set");

  CampaignSummary summary;
  summary.records.resize(n);
  summary.probabilities.resize(n);
  summary.images.resize(n);
  std::atomic<int> warned{0};

  parallel_for(n, workers, [&](int i) {
    const QATriple& triple = targets.triples[i];
    const Image source = render_scene(triple.scene);
    const std::uint64_t triple_seed = mix_seed(seed, static_cast<std::uint64_t>(i));

    const double source_loss = -std::log(
        std::max(vqa_forward(model, source, triple.question).probs[triple.target_answer],
                 kProbFloor));
    const bool t2 = check_theorem2(cfg, source_loss);
    if (!t2 && warned.fetch_add(1) == 0) {
      std::fprintf(stderr,
                   "warning: bound guarantee condition violated for at least one triple "
                   "(lambda2*eps <= source loss + lambda1*tau)\n");
    }

    AttackResult result =
        method == AttackMethod::Ours
            ? attack_with_restarts(model, source, triple.question, triple.target_answer, cfg,
                                   triple_seed)
            : attack_cw_with_restarts(model, source, triple.question, triple.target_answer,
                                      cw_cfg, triple_seed);

    summary.records[i] = {i,
                          triple.target_answer,
                          result.success,
                          result.adversarial_probability,
                          result.iterations_used,
                          result.final_rmse,
                          t2};
    summary.probabilities[i] = result.adversarial_probability;
    summary.images[i] = std::move(result.image);
  });

  std::vector<bool> successes;
  successes.reserve(n);
  for (const auto& r : summary.records) successes.push_back(r.success);
  summary.success_rate = success_rate(successes);
  summary.cdf = empirical_cdf(summary.probabilities);
  return summary;
}

CaptionCampaignSummary run_caption_campaign(const DenseCapVictim& model,
                                            const std::vector<CaptionTarget>& targets,
                                            const AttackConfig& cfg, std::uint64_t seed,
                                            int workers) {
  cfg.validate();
  const int n = static_cast<int>(targets.size());
  if (n == 0) throw InvalidArgument("run_caption_campaign: empty target set");

  CaptionCampaignSummary summary;
  summary.records.resize(n);

  parallel_for(n, workers, [&](int i) {
    const Image source = render_scene(targets[i].scene);
    AttackResult result = attack_densecap(model, source, targets[i].caption, cfg,
                                          mix_seed(seed, static_cast<std::uint64_t>(i)));
    CaptionRecord rec;
    rec.index = i;
    rec.success = result.success;
    rec.adversarial_probability = result.adversarial_probability;
    rec.iterations_used = result.iterations_used;
    rec.final_rmse = result.final_rmse;
    rec.target_text = caption_text(targets[i].caption);
    for (const auto& c : result.decoded) rec.decoded_texts.push_back(caption_text(c));
    summary.records[i] = std::move(rec);
  });

  std::vector<bool> successes;
  for (const auto& r : summary.records) successes.push_back(r.success);
  summary.success_rate = success_rate(successes);
  return summary;
}

}  // namespace avlt
