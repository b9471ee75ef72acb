// avlt command-line driver: data generation, victim training, attack
// campaigns, evaluation, and the prior/transfer studies.
#include "avlt/attacks.hpp"
#include "avlt/campaign.hpp"
#include "avlt/gradcheck.hpp"
#include "avlt/report.hpp"
#include "avlt/targets.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <thread>

using namespace avlt;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

using Clock = std::chrono::steady_clock;

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  std::string out_dir = "runs/default";
  int train_scenes = 1200;
  int val_scenes = 60;
  TrainConfig vqa_train;
  CapTrainConfig cap_train;
  AttackConfig attack;
  CwConfig cw;
  int prior_probe_images = 500;

  std::string raw_json = "{}";  // exact bytes that were hashed
};

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig cfg;
  json j = json::object();
  if (!path.empty()) {
    cfg.raw_json = read_text_file(path);
    j = json::parse(cfg.raw_json);
  }
  maybe(j, "seed", cfg.seed);
  maybe(j, "workers", cfg.workers);
  maybe(j, "out_dir", cfg.out_dir);
  if (j.contains("data")) {
    const json& d = j.at("data");
    maybe(d, "train_scenes", cfg.train_scenes);
    maybe(d, "val_scenes", cfg.val_scenes);
  }
  if (j.contains("train_vqa")) {
    const json& t = j.at("train_vqa");
    maybe(t, "epochs", cfg.vqa_train.epochs);
    maybe(t, "batch_size", cfg.vqa_train.batch_size);
    maybe(t, "learning_rate", cfg.vqa_train.learning_rate);
    maybe(t, "weight_decay", cfg.vqa_train.weight_decay);
    maybe(t, "target_accuracy", cfg.vqa_train.target_accuracy);
  }
  if (j.contains("train_cap")) {
    const json& t = j.at("train_cap");
    maybe(t, "epochs", cfg.cap_train.epochs);
    maybe(t, "batch_size", cfg.cap_train.batch_size);
    maybe(t, "learning_rate", cfg.cap_train.learning_rate);
    maybe(t, "target_exact_match", cfg.cap_train.target_exact_match);
  }
  if (j.contains("attack")) {
    const json& a = j.at("attack");
    maybe(a, "bound", cfg.attack.bound);
    maybe(a, "eps", cfg.attack.eps);
    maybe(a, "lambda1", cfg.attack.lambda1);
    maybe(a, "lambda2", cfg.attack.lambda2);
    maybe(a, "tau", cfg.attack.tau);
    maybe(a, "eta", cfg.attack.eta);
    maybe(a, "maxitr", cfg.attack.maxitr);
    maybe(a, "min_iter", cfg.attack.min_iter);
    maybe(a, "restarts", cfg.attack.restarts);
    if (a.contains("optimizer")) {
      cfg.attack.optimizer = optimizer_kind_from_string(a.at("optimizer").get<std::string>());
    }
    if (a.contains("caption_distance")) {
      const std::string mode = a.at("caption_distance");
      if (mode == "bounded") {
        cfg.attack.caption_distance = DistanceMode::BoundedRelu;
      } else if (mode == "plain") {
        cfg.attack.caption_distance = DistanceMode::PlainLambda;
      } else {
        throw InvalidArgument("caption_distance must be 'bounded' or 'plain'");
      }
    }
    maybe(a, "plain_lambda", cfg.attack.plain_lambda);
  }
  if (j.contains("cw")) {
    const json& c = j.at("cw");
    maybe(c, "lambda", cfg.cw.lambda);
    maybe(c, "eta", cfg.cw.eta);
    maybe(c, "maxitr", cfg.cw.maxitr);
    maybe(c, "min_iter", cfg.cw.min_iter);
    maybe(c, "restarts", cfg.cw.restarts);
  }
  if (j.contains("prior")) maybe(j.at("prior"), "probe_images", cfg.prior_probe_images);

  if (const char* env = std::getenv("AVLT_SEED")) {
    cfg.seed = std::strtoull(env, nullptr, 10);
  }
  cfg.attack.validate();
  cfg.cw.validate();
  if (cfg.train_scenes <= 0 || cfg.val_scenes <= 0) {
    throw InvalidArgument("data.train_scenes and data.val_scenes must be positive");
  }
  if (cfg.workers < 0) throw InvalidArgument("workers must be >= 0");
  return cfg;
}

int effective_workers(const ExperimentConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 4 : static_cast<int>(hw);
}

// Appends one stage entry to out_dir/manifest.json (written atomically).
void record_stage(const ExperimentConfig& cfg, const std::string& stage,
                  const std::vector<std::string>& outputs, double seconds) {
  const fs::path path = fs::path(cfg.out_dir) / "manifest.json";
  json manifest;
  if (fs::exists(path)) manifest = json::parse(read_text_file(path.string()));
  manifest["version"] = kVersion;
  manifest["config_hash"] = hash_bytes(cfg.raw_json);
  manifest["seed"] = cfg.seed;
  json entry;
  entry["outputs"] = outputs;
  entry["seconds"] = seconds;
  manifest["stages"][stage] = std::move(entry);

  const fs::path tmp = path.string() + ".tmp";
  write_text_file(tmp.string(), manifest.dump(2) + "\n");
  fs::rename(tmp, path);
}

fs::path models_dir(const ExperimentConfig& cfg) { return fs::path(cfg.out_dir) / "models"; }
fs::path results_dir(const ExperimentConfig& cfg) { return fs::path(cfg.out_dir) / "results"; }

std::string vqa_model_path(const ExperimentConfig& cfg, VqaVariant v) {
  return (models_dir(cfg) /
          (v == VqaVariant::Monolithic ? "vqa_monolithic.bin" : "vqa_attentive.bin"))
      .string();
}

VqaVictim load_victim_or_fail(const ExperimentConfig& cfg, VqaVariant v) {
  const std::string path = vqa_model_path(cfg, v);
  if (!fs::exists(path)) {
    throw InvalidArgument("missing checkpoint " + path + " (run train-vqa first)");
  }
  return load_vqa(path);
}

VqaVariant variant_from_string(const std::string& name) {
  if (name == "monolithic") return VqaVariant::Monolithic;
  if (name == "attentive") return VqaVariant::Attentive;
  throw InvalidArgument("unknown victim variant: " + name);
}

// ---- subcommand bodies -----------------------------------------------------

int cmd_gen_data(const ExperimentConfig& cfg) {
  const auto t = Clock::now();
  const Corpus corpus = generate_dataset(cfg.train_scenes, cfg.val_scenes, cfg.seed);

  json scenes_json = json::array();
  const auto dump_split = [&](const std::vector<SceneSpec>& scenes, const char* split) {
    for (const auto& s : scenes) {
      json objs = json::array();
      for (const auto& o : s.objects) {
        objs.push_back({{"shape", shape_name(o.shape)},
                        {"color", color_name(o.color)},
                        {"position", position_name(o.position)}});
      }
      scenes_json.push_back({{"split", split}, {"seed", s.seed}, {"objects", objs}});
    }
  };
  dump_split(corpus.train_scenes, "train");
  dump_split(corpus.val_scenes, "val");

  json out;
  out["seed"] = cfg.seed;
  out["train_scenes"] = corpus.train_scenes.size();
  out["val_scenes"] = corpus.val_scenes.size();
  out["train_samples"] = corpus.train.size();
  out["val_samples"] = corpus.val.size();
  out["scenes"] = std::move(scenes_json);

  const fs::path data = fs::path(cfg.out_dir) / "data";
  write_text_file((data / "dataset.json").string(), out.dump(2) + "\n");
  std::vector<std::string> outputs = {(data / "dataset.json").string()};
  for (int i = 0; i < std::min<int>(4, cfg.val_scenes); ++i) {
    const std::string ppm = (data / ("val_scene_" + std::to_string(i) + ".ppm")).string();
    write_ppm(render_scene(corpus.val_scenes[i]), ppm);
    outputs.push_back(ppm);
  }
  record_stage(cfg, "gen-data", outputs, std::chrono::duration<double>(Clock::now() - t).count());
  std::printf("gen-data: %zu train / %zu val samples from %d + %d scenes\n",
              corpus.train.size(), corpus.val.size(), cfg.train_scenes, cfg.val_scenes);
  return 0;
}

int cmd_train_vqa(const ExperimentConfig& cfg, const std::string& which) {
  const auto t = Clock::now();
  const Corpus corpus = generate_dataset(cfg.train_scenes, cfg.val_scenes, cfg.seed);
  std::vector<VqaVariant> variants;
  if (which == "both") {
    variants = {VqaVariant::Monolithic, VqaVariant::Attentive};
  } else {
    variants = {variant_from_string(which)};
  }
  std::vector<std::string> outputs;
  json summary;
  for (VqaVariant v : variants) {
    const std::uint64_t s =
        mix_seed(cfg.seed, v == VqaVariant::Monolithic ? 1 : 2);
    const VqaTrainReport rep = train_vqa(corpus, v, cfg.vqa_train, s);
    const std::string path = vqa_model_path(cfg, v);
    fs::create_directories(models_dir(cfg));
    save_vqa(rep.model, path);
    outputs.push_back(path);
    const char* name = v == VqaVariant::Monolithic ? "monolithic" : "attentive";
    summary[name] = {{"val_accuracy", rep.val_accuracy},
                     {"epochs_run", rep.epochs_run},
                     {"checkpoint", path}};
    std::printf("train-vqa %s: val accuracy %.4f after %d epochs -> %s\n", name,
                rep.val_accuracy, rep.epochs_run, path.c_str());
  }
  const std::string summary_path = (models_dir(cfg) / "train_vqa.json").string();
  write_text_file(summary_path, summary.dump(2) + "\n");
  outputs.push_back(summary_path);
  record_stage(cfg, "train-vqa", outputs,
               std::chrono::duration<double>(Clock::now() - t).count());
  return 0;
}

int cmd_train_cap(const ExperimentConfig& cfg) {
  const auto t = Clock::now();
  const Corpus corpus = generate_dataset(cfg.train_scenes, cfg.val_scenes, cfg.seed);
  const CapTrainReport rep =
      train_captioner(corpus.train_scenes, corpus.val_scenes, cfg.cap_train, mix_seed(cfg.seed, 3));
  const std::string path = (models_dir(cfg) / "captioner.bin").string();
  fs::create_directories(models_dir(cfg));
  save_captioner(rep.model, path);
  json summary = {{"val_exact_match", rep.val_exact_match},
                  {"epochs_run", rep.epochs_run},
                  {"checkpoint", path}};
  const std::string summary_path = (models_dir(cfg) / "train_cap.json").string();
  write_text_file(summary_path, summary.dump(2) + "\n");
  record_stage(cfg, "train-cap", {path, summary_path},
               std::chrono::duration<double>(Clock::now() - t).count());
  std::printf("train-cap: val exact match %.4f after %d epochs -> %s\n", rep.val_exact_match,
              rep.epochs_run, path.c_str());
  return 0;
}

int cmd_attack_vqa(const ExperimentConfig& cfg, const std::string& attack_name,
                   const std::string& targets_name, const std::string& victim_name) {
  const auto t = Clock::now();
  const AttackMethod method = attack_method_from_string(attack_name);
  const TargetKind kind = target_kind_from_string(targets_name);
  const VqaVariant variant = variant_from_string(victim_name);

  const Corpus corpus = generate_dataset(cfg.train_scenes, cfg.val_scenes, cfg.seed);
  const VqaVictim mono = load_victim_or_fail(cfg, VqaVariant::Monolithic);
  const VqaVictim att = load_victim_or_fail(cfg, VqaVariant::Attentive);
  const VqaVictim& victim = variant == VqaVariant::Monolithic ? mono : att;

  const TargetSet set = build_target_set(kind, corpus, {&mono, &att}, cfg.seed);
  std::printf("attack-vqa: %zu triples (%s, %s, %s)\n", set.triples.size(),
              targets_name.c_str(), attack_name.c_str(), victim_name.c_str());

  const std::uint64_t campaign_seed =
      mix_seed(cfg.seed, mix_seed(static_cast<std::uint64_t>(kind),
                                  (method == AttackMethod::Ours ? 100 : 200) +
                                      (variant == VqaVariant::Monolithic ? 0 : 1)));
  const CampaignSummary summary = run_vqa_campaign(victim, set, cfg.attack, cfg.cw, method,
                                                   campaign_seed, effective_workers(cfg));

  const fs::path dir =
      results_dir(cfg) / (targets_name + "_" + attack_name + "_" + victim_name);
  emit_report(summary, dir.string(), hash_bytes(cfg.raw_json));
  write_text_file((dir / "targets.json").string(), target_set_to_json(set) + "\n");
  const fs::path img_dir = dir / "images";
  fs::create_directories(img_dir);
  for (std::size_t i = 0; i < summary.images.size(); ++i) {
    char leaf[32];
    std::snprintf(leaf, sizeof(leaf), "%04zu.ppm", i);
    write_ppm(summary.images[i], (img_dir / leaf).string());
  }
  record_stage(cfg, "attack-vqa:" + targets_name + ":" + attack_name + ":" + victim_name,
               {dir.string()}, std::chrono::duration<double>(Clock::now() - t).count());
  std::printf("attack-vqa: success rate %.3f, reports in %s\n", summary.success_rate,
              dir.string().c_str());
  return 0;
}

int cmd_attack_cap(const ExperimentConfig& cfg, int n_scenes) {
  const auto t = Clock::now();
  const Corpus corpus = generate_dataset(cfg.train_scenes, cfg.val_scenes, cfg.seed);
  const std::string path = (models_dir(cfg) / "captioner.bin").string();
  if (!fs::exists(path)) {
    throw InvalidArgument("missing checkpoint " + path + " (run train-cap first)");
  }
  const DenseCapVictim captioner = load_captioner(path);
  const auto targets = build_caption_targets(corpus, n_scenes);
  std::printf("attack-cap: %zu (image, caption) runs\n", targets.size());
  const CaptionCampaignSummary summary = run_caption_campaign(
      captioner, targets, cfg.attack, mix_seed(cfg.seed, 40), effective_workers(cfg));
  const fs::path dir = results_dir(cfg) / "captions";
  emit_caption_report(summary, dir.string(), hash_bytes(cfg.raw_json));
  record_stage(cfg, "attack-cap", {dir.string()},
               std::chrono::duration<double>(Clock::now() - t).count());
  std::printf("attack-cap: top-1 exact success rate %.3f, reports in %s\n",
              summary.success_rate, dir.string().c_str());
  return 0;
}

int cmd_eval(const ExperimentConfig& cfg, const std::string& results_arg) {
  const fs::path root = results_arg.empty() ? results_dir(cfg) : fs::path(results_arg);
  if (!fs::exists(root)) throw InvalidArgument("no results directory at " + root.string());

  std::vector<fs::path> dirs;
  if (fs::exists(root / "summary.json")) {
    dirs.push_back(root);
  } else {
    for (const auto& e : fs::directory_iterator(root)) {
      if (e.is_directory() && fs::exists(e.path() / "summary.json")) dirs.push_back(e.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) {
    throw InvalidArgument("no campaign summaries under " + root.string());
  }
  for (const auto& dir : dirs) {
    const json summary = json::parse(read_text_file((dir / "summary.json").string()));
    std::printf("%s:\n", dir.filename().string().c_str());
    std::printf("  success_rate       %.4f\n", summary.at("success_rate").get<double>());
    if (summary.contains("mean_adversarial_probability")) {
      std::printf("  mean adv. prob.    %.4f\n",
                  summary.at("mean_adversarial_probability").get<double>());
      std::printf("  median adv. prob.  %.4f\n",
                  summary.at("median_adversarial_probability").get<double>());
      std::printf("  cdf                %s\n", (dir / "cdf.csv").string().c_str());
      // Consistency: success rate must match the per-triple records.
      const json per = json::parse(read_text_file((dir / "per_triple.json").string()));
      int succ = 0;
      for (const auto& r : per) succ += r.at("success").get<bool>() ? 1 : 0;
      const double recomputed = double(succ) / double(per.size());
      if (std::abs(recomputed - summary.at("success_rate").get<double>()) > 1e-12) {
        throw NumericalError("summary.json disagrees with per_triple.json in " + dir.string());
      }
    }
    if (summary.contains("acc_topk")) {
      for (const auto& [metric, row] : summary.at("acc_topk").items()) {
        std::printf("  Acc %-12s", metric.c_str());
        for (const auto& v : row) std::printf("  K=%0.3f", v.get<double>());
        std::printf("\n");
      }
      std::printf("  failure rate       %.4f\n",
                  summary.at("failure_rate_meteor_0.15").get<double>());
    }
  }
  return 0;
}

int cmd_prior(const ExperimentConfig& cfg, int n_seeds) {
  const auto t = Clock::now();
  const Corpus corpus = generate_dataset(cfg.train_scenes, cfg.val_scenes, cfg.seed);
  const VqaVictim mono = load_victim_or_fail(cfg, VqaVariant::Monolithic);

  std::vector<Image> probes;
  for (int i = 0; i < cfg.prior_probe_images; ++i) {
    probes.push_back(render_scene(random_scene(mix_seed(cfg.seed, 0x70000 + i))));
  }
  const Question q = make_count_question();
  const FrequencyTable freq = answer_frequency(mono, probes, q);

  AttackConfig prior_cfg = cfg.attack;
  prior_cfg.restarts = 1;

  const fs::path dir = results_dir(cfg) / "prior";
  std::vector<std::string> outputs;
  json summary;
  summary["question"] = question_text(q);
  summary["probe_images"] = cfg.prior_probe_images;
  json rhos = json::array();
  for (int s = 0; s < n_seeds; ++s) {
    std::vector<double> adv(kNumAnswers, 0.0);
    parallel_for(kNumAnswers, effective_workers(cfg), [&](int a) {
      double total = 0.0;
      for (int img = 0; img < kSourceImages; ++img) {
        const Image x = render_scene(corpus.val_scenes[img]);
        const AttackResult r = attack_with_restarts(
            mono, x, q, a, prior_cfg, mix_seed(mix_seed(cfg.seed, 30 + s), a * 100 + img));
        total += r.adversarial_probability;
      }
      adv[a] = total / double(kSourceImages);
    });
    const double rho = prior_correlation(freq, adv);
    rhos.push_back(rho);
    const std::string csv = (dir / ("freq_vs_prob_seed" + std::to_string(s) + ".csv")).string();
    emit_prior_csv(freq, adv, csv);
    outputs.push_back(csv);
    std::printf("prior: seed offset %d -> spearman rho %.4f (%s)\n", s, rho, csv.c_str());
  }
  summary["spearman_rho"] = std::move(rhos);
  const std::string summary_path = (dir / "summary.json").string();
  write_text_file(summary_path, summary.dump(2) + "\n");
  outputs.push_back(summary_path);
  record_stage(cfg, "prior", outputs, std::chrono::duration<double>(Clock::now() - t).count());
  return 0;
}

int cmd_transfer(const ExperimentConfig& cfg) {
  const auto t = Clock::now();
  const Corpus corpus = generate_dataset(cfg.train_scenes, cfg.val_scenes, cfg.seed);
  const VqaVictim mono = load_victim_or_fail(cfg, VqaVariant::Monolithic);
  const VqaVictim att = load_victim_or_fail(cfg, VqaVariant::Attentive);
  const TargetSet gold = build_target_set(TargetKind::Gold, corpus, {&mono, &att}, cfg.seed);

  const auto run = [&](const VqaVictim& a, const VqaVictim& b, std::uint64_t s) {
    const CampaignSummary campaign = run_vqa_campaign(a, gold, cfg.attack, cfg.cw,
                                                      AttackMethod::Ours, s,
                                                      effective_workers(cfg));
    std::vector<bool> success;
    for (const auto& r : campaign.records) success.push_back(r.success);
    return transfer_rate(gold.triples, success, campaign.images, b);
  };
  const TransferReport m2a = run(mono, att, mix_seed(cfg.seed, 50));
  const TransferReport a2m = run(att, mono, mix_seed(cfg.seed, 51));

  json out;
  out["monolithic_to_attentive"] = {{"successes_on_source", m2a.successes_on_a},
                                    {"transferred", m2a.transferred},
                                    {"rate", m2a.rate}};
  out["attentive_to_monolithic"] = {{"successes_on_source", a2m.successes_on_a},
                                    {"transferred", a2m.transferred},
                                    {"rate", a2m.rate}};
  const std::string path = (results_dir(cfg) / "transfer.json").string();
  write_text_file(path, out.dump(2) + "\n");
  record_stage(cfg, "transfer", {path},
               std::chrono::duration<double>(Clock::now() - t).count());
  std::printf("transfer: mono->att %d/%d = %.3f, att->mono %d/%d = %.3f (%s)\n",
              m2a.transferred, m2a.successes_on_a, m2a.rate, a2m.transferred,
              a2m.successes_on_a, a2m.rate, path.c_str());
  return 0;
}

int cmd_gradcheck(const ExperimentConfig& cfg, int probes) {
  if (probes <= 0) throw InvalidArgument("gradcheck: probes must be positive");
  // Use trained checkpoints when available, fresh initializations otherwise.
  const VqaVictim mono = fs::exists(vqa_model_path(cfg, VqaVariant::Monolithic))
                             ? load_vqa(vqa_model_path(cfg, VqaVariant::Monolithic))
                             : make_vqa_victim(VqaVariant::Monolithic, mix_seed(cfg.seed, 61));
  const VqaVictim att = fs::exists(vqa_model_path(cfg, VqaVariant::Attentive))
                            ? load_vqa(vqa_model_path(cfg, VqaVariant::Attentive))
                            : make_vqa_victim(VqaVariant::Attentive, mix_seed(cfg.seed, 62));
  const std::string cap_path = (models_dir(cfg) / "captioner.bin").string();
  const DenseCapVictim cap = fs::exists(cap_path) ? load_captioner(cap_path)
                                                  : make_captioner(mix_seed(cfg.seed, 63));

  std::mt19937_64 rng(mix_seed(cfg.seed, 64));
  std::uniform_real_distribution<double> pix(0.0, 255.0);
  std::uniform_int_distribution<int> coord(0, kImagePixels - 1);
  std::uniform_int_distribution<int> answer(0, kNumAnswers - 1);
  const Question q = make_count_question();
  const Caption cap_target = caption_from_words({"a", "red", "circle"});

  int checked = 0, failed = 0;
  const auto audit = [&](const Gradient& grad, const ScalarFn& f, const Image& x) {
    const int i = coord(rng);
    ++checked;
    if (!grad_close(grad[i], finite_diff_partial(f, x, i))) ++failed;
  };

  for (int p = 0; p < probes; ++p) {
    Image x = make_image();
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = pix(rng);
    const int target = answer(rng);

    for (const VqaVictim* model : {&mono, &att}) {
      const ProbObjective obj = [&](const Probs& pr) {
        // log(max(p, floor)) is locally constant below the floor, so the
        // audited gradient must vanish there too.
        Eigen::VectorXd dp = Eigen::VectorXd::Zero(kNumAnswers);
        if (pr[target] > kProbFloor) dp[target] = -1.0 / pr[target];
        return std::make_pair(-std::log(std::max(pr[target], kProbFloor)), dp);
      };
      const auto [loss, grad] = vqa_loss_grad(*model, x, q, obj);
      (void)loss;
      const ScalarFn f = [&](const Eigen::ArrayXd& xx) {
        return -std::log(std::max(vqa_forward(*model, xx, q).probs[target], kProbFloor));
      };
      audit(grad, f, x);
    }
    {
      const auto [loss, grad] = densecap_teacher_loss(cap, x, cap_target);
      (void)loss;
      const ScalarFn f = [&](const Eigen::ArrayXd& xx) {
        return densecap_teacher_loss_value(cap, xx, cap_target);
      };
      audit(grad, f, x);
    }
  }
  std::printf("gradcheck: %d probes, %d failures (rel. tol 1e-4)\n", checked, failed);
  if (failed != 0) throw NumericalError("gradcheck: analytic/numeric gradient mismatch");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Targeted adversarial attacks on toy vision-and-language models"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, targets = "gold", attack = "ours", victim = "monolithic";
  std::string variant = "both", results_path;
  int probes = 100, cap_scenes = 40, prior_seeds = 3;
  std::string out_dir_override;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (json)");
    sub->add_option("--out-dir", out_dir_override, "override out_dir from the config");
  };

  auto* gen = app.add_subcommand("gen-data", "generate the synthetic corpus");
  add_common(gen);
  auto* tv = app.add_subcommand("train-vqa", "train the VQA victims");
  add_common(tv);
  tv->add_option("--variant", variant, "monolithic|attentive|both");
  auto* tc = app.add_subcommand("train-cap", "train the dense captioner");
  add_common(tc);
  auto* av = app.add_subcommand("attack-vqa", "run a VQA attack campaign");
  add_common(av);
  av->add_option("--attack", attack, "ours|cw");
  av->add_option("--targets", targets, "popular|rare|gold|nonsense");
  av->add_option("--victim", victim, "monolithic|attentive");
  auto* ac = app.add_subcommand("attack-cap", "run the dense-caption attack campaign");
  add_common(ac);
  ac->add_option("--scenes", cap_scenes, "source scenes (5 captions each)");
  auto* ev = app.add_subcommand("eval", "summarize campaign results");
  add_common(ev);
  ev->add_option("--results", results_path, "results directory (defaults to out_dir/results)");
  auto* pr = app.add_subcommand("prior", "answer-frequency prior study");
  add_common(pr);
  pr->add_option("--seeds", prior_seeds, "number of study repetitions");
  auto* tr = app.add_subcommand("transfer", "cross-victim transfer study");
  add_common(tr);
  auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient audit");
  add_common(gc);
  gc->add_option("--probes", probes, "random probes per model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    ExperimentConfig cfg = load_config(config_path);
    if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;

    if (gen->parsed()) return cmd_gen_data(cfg);
    if (tv->parsed()) return cmd_train_vqa(cfg, variant);
    if (tc->parsed()) return cmd_train_cap(cfg);
    if (av->parsed()) return cmd_attack_vqa(cfg, attack, targets, victim);
    if (ac->parsed()) return cmd_attack_cap(cfg, cap_scenes);
    if (ev->parsed()) return cmd_eval(cfg, results_path);
    if (pr->parsed()) return cmd_prior(cfg, prior_seeds);
    if (tr->parsed()) return cmd_transfer(cfg);
    if (gc->parsed()) return cmd_gradcheck(cfg, probes);
    return 1;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 1;
  } catch (const ConstructionError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 1;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 2;
  }
}
