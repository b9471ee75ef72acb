#include "avlt/vqa.hpp"

#include "avlt/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace avlt {

namespace {

constexpr int kPatches = kFeatureGrid * kFeatureGrid;
constexpr double kPixelScale = 128.0;

Eigen::VectorXd stable_softmax(const Eigen::VectorXd& z) {
  const Eigen::ArrayXd shifted = z.array() - z.maxCoeff();
  const Eigen::ArrayXd e = shifted.exp();
  return (e / e.sum()).matrix();
}

void init_gaussian(Eigen::MatrixXd& m, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> dist(0.0, scale);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = dist(rng);
  }
}

void check_question(const Question& q) {
  if (q.token_ids.empty()) throw InvalidArgument("question must be non-empty");
  for (int id : q.token_ids) {
    if (id < 0 || id >= question_vocab_size()) {
      throw InvalidArgument("question token id out of range");
    }
  }
}

}  // namespace

void validate_probs(const Probs& probs) {
  if (probs.size() != kNumAnswers) throw InvalidArgument("ProbVector: wrong size");
  if (probs.minCoeff() < 0.0) throw NumericalError("ProbVector: negative entry");
  if (std::abs(probs.sum() - 1.0) > 1e-6) throw NumericalError("ProbVector: does not sum to 1");
}

VqaVictim make_vqa_victim(VqaVariant variant, std::uint64_t seed) {
  VqaVictim model;
  model.variant = variant;
  auto& p = model.params;
  p.add("meta_variant", 1, 1)(0, 0) = variant == VqaVariant::Attentive ? 1.0 : 0.0;
  p.add("q_embed", question_vocab_size(), kFeatureDim);
  p.add("enc_w", kFeatureDim, kPatchDim);
  p.add("enc_b", kFeatureDim, 1);
  p.add("pos_emb", kFeatureDim, kPatches);
  p.add("w1", kVqaHidden, kFeatureDim);
  p.add("b1", kVqaHidden, 1);
  p.add("w2", kNumAnswers, kVqaHidden);
  p.add("b2", kNumAnswers, 1);
  p.add("w_prior", kNumAnswers, kFeatureDim);
  if (variant == VqaVariant::Attentive) {
    p.add("att_wf", kFeatureDim, 1);
    p.add("att_wq", kFeatureDim, 1);
    p.add("att_b", 1, 1);
  }
  auto rng = make_rng(mix_seed(seed, 0x76716131));
  init_gaussian(p.at("q_embed"), rng, 0.5);
  init_gaussian(p.at("enc_w"), rng, 1.0 / std::sqrt(double(kPatchDim)));
  init_gaussian(p.at("w1"), rng, 1.0 / std::sqrt(double(kFeatureDim)));
  init_gaussian(p.at("w2"), rng, 1.0 / std::sqrt(double(kVqaHidden)));
  init_gaussian(p.at("w_prior"), rng, 1.0 / std::sqrt(double(kFeatureDim)));
  if (variant == VqaVariant::Attentive) {
    init_gaussian(p.at("att_wf"), rng, 1.0 / std::sqrt(double(kFeatureDim)));
    init_gaussian(p.at("att_wq"), rng, 1.0 / std::sqrt(double(kFeatureDim)));
  }
  return model;
}

void save_vqa(const VqaVictim& model, const std::string& path) {
  save_params(model.params, path);
}

VqaVictim load_vqa(const std::string& path) {
  VqaVictim model;
  model.params = load_params(path);
  model.variant = model.params.at("meta_variant")(0, 0) > 0.5 ? VqaVariant::Attentive
                                                              : VqaVariant::Monolithic;
  return model;
}

VqaActivations vqa_forward(const VqaVictim& model, const Image& x, const Question& q) {
  check_question(q);
  if (x.size() != kImagePixels) throw InvalidArgument("image has wrong size");

  const auto& p = model.params;
  VqaActivations a;

  a.patches.resize(kPatchDim, kPatches);
  for (int gr = 0; gr < kFeatureGrid; ++gr) {
    for (int gc = 0; gc < kFeatureGrid; ++gc) {
      const int s = gr * kFeatureGrid + gc;
      int k = 0;
      for (int dr = 0; dr < kPatchSize; ++dr) {
        for (int dc = 0; dc < kPatchSize; ++dc) {
          for (int ch = 0; ch < kImageChannels; ++ch) {
            a.patches(k++, s) =
                (x[pixel_index(gr * kPatchSize + dr, gc * kPatchSize + dc, ch)] - kPixelScale) /
                kPixelScale;
          }
        }
      }
    }
  }

  // Per-patch positional bias keeps the pooled feature sensitive to where a
  // fragment sits in the grid; without it mean pooling is permutation
  // invariant and position questions are unanswerable.
  a.feats = (p.at("enc_w") * a.patches + p.at("pos_emb")).colwise() + p.at("enc_b").col(0);
  a.feats = a.feats.array().tanh();

  a.qvec = Eigen::VectorXd::Zero(kFeatureDim);
  for (int id : q.token_ids) a.qvec += p.at("q_embed").row(id).transpose();

  if (model.variant == VqaVariant::Attentive) {
    Eigen::VectorXd scores =
        a.feats.transpose() * p.at("att_wf").col(0) +
        Eigen::VectorXd::Constant(kPatches,
                                  p.at("att_wq").col(0).dot(a.qvec) + p.at("att_b")(0, 0));
    a.att = stable_softmax(scores);
    a.pooled = a.feats * a.att;
  } else {
    a.pooled = a.feats.rowwise().mean();
  }

  a.fused = a.pooled.cwiseProduct(a.qvec);
  a.hidden = (p.at("w1") * a.fused + p.at("b1").col(0)).array().tanh();
  // Question-only prior head: lets the skewed answer statistics shape the
  // logits independently of the (bounded) image pathway.
  a.logits = p.at("w2") * a.hidden + p.at("b2").col(0) + p.at("w_prior") * a.qvec;
  a.probs = stable_softmax(a.logits);
  return a;
}

int argmax_lowest(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

int predict_answer(const VqaVictim& model, const Image& x, const Question& q) {
  return argmax_lowest(vqa_forward(model, x, q).probs);
}

Eigen::VectorXd softmax_pullback(const Probs& probs, const Eigen::VectorXd& dprobs) {
  const double inner = probs.dot(dprobs);
  return probs.cwiseProduct(dprobs - Eigen::VectorXd::Constant(probs.size(), inner));
}

void vqa_backward(const VqaVictim& model, const VqaActivations& a, const Question& q,
                  const Eigen::VectorXd& dlogits, Gradient* pixel_grad,
                  ParamStore* param_grads) {
  const auto& p = model.params;

  const Eigen::VectorXd dhidden = p.at("w2").transpose() * dlogits;
  const Eigen::VectorXd dqvec_prior = p.at("w_prior").transpose() * dlogits;
  const Eigen::VectorXd dpre1 =
      dhidden.cwiseProduct((1.0 - a.hidden.array().square()).matrix());
  const Eigen::VectorXd dfused = p.at("w1").transpose() * dpre1;
  Eigen::VectorXd dpooled = dfused.cwiseProduct(a.qvec);
  Eigen::VectorXd dqvec = dfused.cwiseProduct(a.pooled) + dqvec_prior;

  Eigen::MatrixXd dfeats;
  if (model.variant == VqaVariant::Attentive) {
    // pooled = feats * att
    const Eigen::VectorXd datt = a.feats.transpose() * dpooled;
    dfeats = dpooled * a.att.transpose();
    // softmax pullback on the attention scores
    const double inner = a.att.dot(datt);
    const Eigen::VectorXd dscores =
        a.att.cwiseProduct(datt - Eigen::VectorXd::Constant(datt.size(), inner));
    dfeats += p.at("att_wf").col(0) * dscores.transpose();
    const double dscore_sum = dscores.sum();
    dqvec += p.at("att_wq").col(0) * dscore_sum;
    if (param_grads) {
      param_grads->at("att_wf").col(0) += a.feats * dscores;
      param_grads->at("att_wq").col(0) += a.qvec * dscore_sum;
      param_grads->at("att_b")(0, 0) += dscore_sum;
    }
  } else {
    dfeats = (dpooled / double(kPatches)) * Eigen::RowVectorXd::Ones(kPatches);
  }

  const Eigen::MatrixXd dpre_enc =
      dfeats.cwiseProduct((1.0 - a.feats.array().square()).matrix());

  if (param_grads) {
    param_grads->at("w2") += dlogits * a.hidden.transpose();
    param_grads->at("b2").col(0) += dlogits;
    param_grads->at("w_prior") += dlogits * a.qvec.transpose();
    param_grads->at("w1") += dpre1 * a.fused.transpose();
    param_grads->at("b1").col(0) += dpre1;
    param_grads->at("enc_w") += dpre_enc * a.patches.transpose();
    param_grads->at("enc_b").col(0) += dpre_enc.rowwise().sum();
    param_grads->at("pos_emb") += dpre_enc;
    for (int id : q.token_ids) {
      param_grads->at("q_embed").row(id) += dqvec.transpose();
    }
  }

  if (pixel_grad) {
    const Eigen::MatrixXd dpatches = p.at("enc_w").transpose() * dpre_enc;
    Gradient g = Gradient::Zero(kImagePixels);
    for (int gr = 0; gr < kFeatureGrid; ++gr) {
      for (int gc = 0; gc < kFeatureGrid; ++gc) {
        const int s = gr * kFeatureGrid + gc;
        int k = 0;
        for (int dr = 0; dr < kPatchSize; ++dr) {
          for (int dc = 0; dc < kPatchSize; ++dc) {
            for (int ch = 0; ch < kImageChannels; ++ch) {
              g[pixel_index(gr * kPatchSize + dr, gc * kPatchSize + dc, ch)] =
                  dpatches(k++, s) / kPixelScale;
            }
          }
        }
      }
    }
    *pixel_grad = g;
  }
}

std::pair<double, Gradient> vqa_loss_grad(const VqaVictim& model, const Image& x,
                                          const Question& q, const ProbObjective& objective) {
  const VqaActivations acts = vqa_forward(model, x, q);
  auto [value, dprobs] = objective(acts.probs);
  if (!std::isfinite(value)) throw NumericalError("vqa_loss_grad: objective not finite");
  const Eigen::VectorXd dlogits = softmax_pullback(acts.probs, dprobs);
  Gradient grad;
  vqa_backward(model, acts, q, dlogits, &grad, nullptr);
  require_finite(grad, "vqa pixel gradient");
  return {value, grad};
}

double vqa_accuracy(const VqaVictim& model, const std::vector<VqaSample>& samples) {
  if (samples.empty()) throw InvalidArgument("vqa_accuracy: empty sample set");
  int correct = 0;
  for (const auto& s : samples) {
    if (predict_answer(model, render_scene(s.scene), s.question) == s.answer) ++correct;
  }
  return double(correct) / double(samples.size());
}

VqaTrainReport train_vqa(const Corpus& corpus, VqaVariant variant, const TrainConfig& hyper,
                         std::uint64_t seed) {
  if (corpus.train.empty() || corpus.val.empty()) {
    throw InvalidArgument("train_vqa: corpus must have train and val samples");
  }
  VqaTrainReport report;
  report.model = make_vqa_victim(variant, seed);
  auto& params = report.model.params;

  std::map<std::string, OptimizerState> opt;
  for (const auto& [name, m] : params) opt[name] = OptimizerState::make(OptimizerKind::Adam);

  // Pre-render every training image once.
  std::vector<Image> images;
  images.reserve(corpus.train.size());
  for (const auto& s : corpus.train) images.push_back(render_scene(s.scene));

  auto rng = make_rng(mix_seed(seed, 0x747261696e));
  std::vector<int> order(corpus.train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i) {
      std::uniform_int_distribution<int> pick(0, i);
      std::swap(order[i], order[pick(rng)]);
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t stop = std::min(order.size(), start + hyper.batch_size);
      ParamStore grads = params.zeros_like();
      for (std::size_t j = start; j < stop; ++j) {
        const auto& sample = corpus.train[order[j]];
        const VqaActivations acts = vqa_forward(report.model, images[order[j]], sample.question);
        epoch_loss += -std::log(std::max(acts.probs[sample.answer], 1e-12));
        Eigen::VectorXd dlogits = acts.probs;
        dlogits[sample.answer] -= 1.0;
        vqa_backward(report.model, acts, sample.question, dlogits, nullptr, &grads);
      }
      const double inv = 1.0 / double(stop - start);
      for (auto& [name, g] : grads) {
        Eigen::Map<Eigen::ArrayXd> var(params.at(name).data(), params.at(name).size());
        Eigen::Map<Eigen::ArrayXd> gv(g.data(), g.size());
        if (name.rfind("meta_", 0) == 0) continue;
        var = optimizer_step(opt[name], var, gv * inv, hyper.learning_rate);
        // Decoupled weight decay on the fused->logits perceptron only: keeps
        // the image-driven logit range as small as classification needs while
        // the question prior head and the feature encoder grow unregularized.
        if (hyper.weight_decay > 0.0 &&
            (name == "w1" || name == "b1" || name == "w2" || name == "b2")) {
          var *= 1.0 - hyper.weight_decay;
        }
      }
    }
    report.epoch_losses.push_back(epoch_loss / double(corpus.train.size()));
    report.epochs_run = epoch + 1;
    report.val_accuracy = vqa_accuracy(report.model, corpus.val);
    if (report.val_accuracy >= hyper.target_accuracy) break;
  }
  if (report.val_accuracy < hyper.target_accuracy) {
    throw TrainingFailure("train_vqa: validation accuracy " +
                          std::to_string(report.val_accuracy) + " below target " +
                          std::to_string(hyper.target_accuracy));
  }
  params.check_finite();
  return report;
}

}  // namespace avlt
