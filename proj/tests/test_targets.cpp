#include "avlt/targets.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace avlt;

namespace {

const Corpus& shared_corpus() {
  static const Corpus corpus = generate_dataset(80, 20, 5);
  return corpus;
}

}  // namespace

TEST_CASE("target kind names round-trip") {
  for (auto k : {TargetKind::PopularQA, TargetKind::RareQA, TargetKind::Gold,
                 TargetKind::NonSense}) {
    CHECK(target_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(target_kind_from_string("golden"), InvalidArgument);
}

TEST_CASE("popular and rare sets pair questions with frequency-ranked answers") {
  const Corpus& corpus = shared_corpus();
  const TargetSet popular = build_target_set(TargetKind::PopularQA, corpus, {}, 5);
  const TargetSet rare = build_target_set(TargetKind::RareQA, corpus, {}, 5);

  CHECK_FALSE(popular.triples.empty());
  CHECK_FALSE(rare.triples.empty());
  // Each selected question contributes up to 3 answers x 5 source images.
  CHECK(popular.triples.size() % kSourceImages == 0);
  CHECK(popular.triples.size() <= kTargetQuestions * 3 * kSourceImages);

  for (const auto& t : popular.triples) {
    CHECK(t.image_id >= 0);
    CHECK(t.image_id < kSourceImages);
    CHECK(t.scene == corpus.val_scenes[t.image_id]);
    CHECK(t.target_answer >= 0);
    CHECK(t.target_answer < kNumAnswers);
  }

  // For any question present in both sets, the popular answers must be at
  // least as frequent in the training corpus as the rare ones.
  std::map<int, long> global;
  for (const auto& s : corpus.train) ++global[s.answer];
  std::map<std::vector<int>, std::map<int, long>> per_question;
  for (const auto& s : corpus.train) ++per_question[s.question.token_ids][s.answer];

  std::map<std::vector<int>, long> pop_min, rare_max;
  for (const auto& t : popular.triples) {
    auto& v = per_question[t.question.token_ids];
    auto it = pop_min.find(t.question.token_ids);
    const long count = v[t.target_answer];
    if (it == pop_min.end() || count < it->second) pop_min[t.question.token_ids] = count;
  }
  for (const auto& t : rare.triples) {
    auto& v = per_question[t.question.token_ids];
    auto it = rare_max.find(t.question.token_ids);
    const long count = v[t.target_answer];
    if (it == rare_max.end() || count > it->second) rare_max[t.question.token_ids] = count;
  }
  // Popular picks the top-3 counts, rare the bottom-3 of the same filtered
  // distribution, so for shared questions max(rare) <= min(popular) can only
  // be violated when the question has < 6 surviving answers; tolerate those
  // by checking the dominant direction in aggregate instead.
  double pop_total = 0, rare_total = 0;
  for (const auto& t : popular.triples) pop_total += double(per_question[t.question.token_ids][t.target_answer]);
  for (const auto& t : rare.triples) rare_total += double(per_question[t.question.token_ids][t.target_answer]);
  CHECK(pop_total / double(popular.triples.size()) >=
        rare_total / double(rare.triples.size()));

  // Determinism.
  const TargetSet again = build_target_set(TargetKind::PopularQA, corpus, {}, 5);
  REQUIRE(again.triples.size() == popular.triples.size());
  for (std::size_t i = 0; i < again.triples.size(); ++i) {
    CHECK(again.triples[i].target_answer == popular.triples[i].target_answer);
    CHECK(again.triples[i].question == popular.triples[i].question);
  }
}

TEST_CASE("nonsense targets contradict the question category") {
  const Corpus& corpus = shared_corpus();
  const VqaVictim mono = make_vqa_victim(VqaVariant::Monolithic, 1);
  const TargetSet set = build_target_set(TargetKind::NonSense, corpus, {&mono}, 17);
  CHECK(set.triples.size() == kNonSenseSize);
  for (const auto& t : set.triples) {
    CHECK(answer_category(t.target_answer) != t.question.template_category);
  }
}

TEST_CASE("gold construction demands victim agreement") {
  // Untrained victims rarely answer correctly, so a small corpus cannot yield
  // 100 gold triples and construction must fail loudly.
  const Corpus tiny = generate_dataset(3, 5, 2);
  const VqaVictim mono = make_vqa_victim(VqaVariant::Monolithic, 1);
  const VqaVictim att = make_vqa_victim(VqaVariant::Attentive, 2);
  CHECK_THROWS_AS(build_target_set(TargetKind::Gold, tiny, {&mono, &att}, 3),
                  ConstructionError);
}

TEST_CASE("caption targets tile the fixed caption list over scenes") {
  const Corpus& corpus = shared_corpus();
  const auto targets = build_caption_targets(corpus, 4);
  CHECK(targets.size() == 20);
  std::set<std::string> texts;
  for (const auto& t : targets) texts.insert(caption_text(t.caption));
  CHECK(texts.size() == 5);
  CHECK(texts.count("a red circle") == 1);
  CHECK(texts.count("empty gray region") == 1);
  CHECK_THROWS_AS(build_caption_targets(corpus, 0), InvalidArgument);
  CHECK_THROWS_AS(build_caption_targets(corpus, 1000), InvalidArgument);
}

TEST_CASE("answer frequency counts predictions over the probe set") {
  const VqaVictim mono = make_vqa_victim(VqaVariant::Monolithic, 6);
  std::vector<Image> probes;
  for (int i = 0; i < 20; ++i) probes.push_back(render_scene(random_scene(900 + i)));
  const FrequencyTable table = answer_frequency(mono, probes, make_count_question());
  CHECK(table.counts.size() == kNumAnswers);
  CHECK(table.total() == 20);
  CHECK_THROWS_AS(answer_frequency(mono, {}, make_count_question()), InvalidArgument);
}

TEST_CASE("transfer rate uses source successes as the denominator") {
  const VqaVictim model = make_vqa_victim(VqaVariant::Monolithic, 77);
  std::vector<QATriple> triples;
  std::vector<Image> images;
  std::vector<bool> success;
  for (int i = 0; i < 10; ++i) {
    QATriple t;
    t.scene = random_scene(40 + i);
    t.question = make_count_question();
    const Image img = render_scene(t.scene);
    t.target_answer = predict_answer(model, img, t.question);
    triples.push_back(t);
    images.push_back(img);
    success.push_back(i % 2 == 0);
  }
  // Model B = the same model, targets = its own predictions: full transfer.
  const TransferReport r = transfer_rate(triples, success, images, model);
  CHECK(r.successes_on_a == 5);
  CHECK(r.transferred == 5);
  CHECK(r.rate == doctest::Approx(1.0));

  // Impossible targets: zero transfer.
  for (auto& t : triples) t.target_answer = (t.target_answer + 1) % kNumAnswers;
  const TransferReport z = transfer_rate(triples, success, images, model);
  CHECK(z.transferred == 0);
  CHECK(z.rate == 0.0);

  CHECK_THROWS_AS(transfer_rate(triples, std::vector<bool>(10, false), images, model),
                  InvalidArgument);
  CHECK_THROWS_AS(transfer_rate({}, {}, {}, model), InvalidArgument);
}

TEST_CASE("target sets round-trip through json") {
  const Corpus& corpus = shared_corpus();
  TargetSet set = build_target_set(TargetKind::PopularQA, corpus, {}, 5);
  set.triples.resize(6);
  const std::string text = target_set_to_json(set);
  const TargetSet back = target_set_from_json(text);
  CHECK(back.kind == set.kind);
  REQUIRE(back.triples.size() == set.triples.size());
  for (std::size_t i = 0; i < set.triples.size(); ++i) {
    CHECK(back.triples[i].image_id == set.triples[i].image_id);
    CHECK(back.triples[i].scene.objects == set.triples[i].scene.objects);
    CHECK(back.triples[i].question == set.triples[i].question);
    CHECK(back.triples[i].target_answer == set.triples[i].target_answer);
  }
}
