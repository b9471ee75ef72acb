#include "avlt/report.hpp"

#include "avlt/campaign.hpp"

#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <filesystem>

using namespace avlt;

namespace {

TargetSet small_target_set() {
  TargetSet set;
  set.kind = TargetKind::Gold;
  for (int i = 0; i < 6; ++i) {
    QATriple t;
    t.image_id = i;
    t.scene = random_scene(500 + i);
    t.question = make_count_question();
    t.target_answer = answer_of_count(1 + i % 3);
    set.triples.push_back(t);
  }
  return set;
}

std::filesystem::path tmp_dir(const char* leaf) {
  auto p = std::filesystem::temp_directory_path() / leaf;
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("mean and median hand values") {
  CHECK(mean({1.0, 2.0, 6.0}) == doctest::Approx(3.0));
  CHECK(median({5.0, 1.0, 3.0}) == doctest::Approx(3.0));
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
  CHECK_THROWS_AS(mean({}), InvalidArgument);
  CHECK_THROWS_AS(median({}), InvalidArgument);
}

TEST_CASE("hash_bytes is stable and input-sensitive") {
  CHECK(hash_bytes("abc") == hash_bytes("abc"));
  CHECK(hash_bytes("abc") != hash_bytes("abd"));
  CHECK(hash_bytes("").size() == 16);
}

TEST_CASE("parallel_for covers every index exactly once, any worker count") {
  for (int workers : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(100, workers, [&](int i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
}

TEST_CASE("campaign results are independent of the worker count") {
  const VqaVictim model = make_vqa_victim(VqaVariant::Monolithic, 3);
  const TargetSet set = small_target_set();
  AttackConfig cfg;
  cfg.maxitr = 60;
  cfg.min_iter = 5;
  cfg.restarts = 1;
  CwConfig cw;

  const CampaignSummary one =
      run_vqa_campaign(model, set, cfg, cw, AttackMethod::Ours, 11, 1);
  const CampaignSummary four =
      run_vqa_campaign(model, set, cfg, cw, AttackMethod::Ours, 11, 4);
  REQUIRE(one.records.size() == four.records.size());
  for (std::size_t i = 0; i < one.records.size(); ++i) {
    CHECK(one.records[i].success == four.records[i].success);
    CHECK(one.records[i].adversarial_probability ==
          four.records[i].adversarial_probability);
    CHECK((one.images[i] - four.images[i]).abs().maxCoeff() == 0.0);
  }
  CHECK(one.success_rate == four.success_rate);
}

TEST_CASE("emit_report writes byte-identical files for identical campaigns") {
  const VqaVictim model = make_vqa_victim(VqaVariant::Monolithic, 3);
  const TargetSet set = small_target_set();
  AttackConfig cfg;
  cfg.maxitr = 40;
  cfg.min_iter = 5;
  cfg.restarts = 1;
  CwConfig cw;

  const auto dir_a = tmp_dir("avlt_report_a");
  const auto dir_b = tmp_dir("avlt_report_b");
  const CampaignSummary a = run_vqa_campaign(model, set, cfg, cw, AttackMethod::Ours, 5, 2);
  const CampaignSummary b = run_vqa_campaign(model, set, cfg, cw, AttackMethod::Ours, 5, 3);
  emit_report(a, dir_a.string(), hash_bytes("cfg"));
  emit_report(b, dir_b.string(), hash_bytes("cfg"));

  for (const char* leaf : {"summary.json", "cdf.csv", "per_triple.json"}) {
    const std::string ta = read_text_file((dir_a / leaf).string());
    const std::string tb = read_text_file((dir_b / leaf).string());
    CHECK(ta == tb);
    CHECK_FALSE(ta.empty());
  }
  // cdf.csv carries the documented header.
  CHECK(read_text_file((dir_a / "cdf.csv").string()).rfind("value,cumulative_fraction\n", 0) ==
        0);
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("caption campaign report includes acc tables and failure rate") {
  const DenseCapVictim model = make_captioner(9);
  Corpus corpus;
  for (int i = 0; i < 2; ++i) corpus.val_scenes.push_back(random_scene(700 + i));
  const auto targets = build_caption_targets(corpus, 2);
  AttackConfig cfg;
  cfg.maxitr = 30;
  cfg.min_iter = 5;
  const CaptionCampaignSummary summary = run_caption_campaign(model, targets, cfg, 3, 2);
  CHECK(summary.records.size() == targets.size());

  const auto dir = tmp_dir("avlt_cap_report");
  emit_caption_report(summary, dir.string(), hash_bytes("cap"));
  const std::string text = read_text_file((dir / "summary.json").string());
  CHECK(text.find("acc_topk") != std::string::npos);
  CHECK(text.find("failure_rate_meteor_0.15") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("prior csv lists every answer with both rank columns") {
  FrequencyTable freq;
  freq.counts.assign(kNumAnswers, 0);
  freq.counts[7] = 10;
  freq.counts[8] = 5;
  std::vector<double> probs(kNumAnswers, 0.01);
  probs[7] = 0.9;
  const auto dir = tmp_dir("avlt_prior");
  emit_prior_csv(freq, probs, (dir / "prior.csv").string());
  const std::string text = read_text_file((dir / "prior.csv").string());
  CHECK(text.rfind("answer,frequency,adversarial_probability,frequency_rank,probability_rank\n",
                   0) == 0);
  // Header plus one line per answer.
  CHECK(std::count(text.begin(), text.end(), '\n') == kNumAnswers + 1);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(emit_prior_csv(freq, std::vector<double>(3, 0.0), "/tmp/x.csv"),
                  InvalidArgument);
}
