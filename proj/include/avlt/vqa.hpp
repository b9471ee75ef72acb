#pragma once

#include "avlt/core.hpp"
#include "avlt/params.hpp"
#include "avlt/scenes.hpp"
#include "avlt/vocab.hpp"

#include <functional>
#include <optional>
#include <utility>

namespace avlt {

// Softmax output over the K answers.
using Probs = Eigen::VectorXd;

void validate_probs(const Probs& probs);

// 4x4 attention weights, flattened row-major; sums to 1 (attentive variant).
using AttentionMap = Eigen::VectorXd;

inline constexpr int kFeatureGrid = 4;                     // S
inline constexpr int kPatchSize = kImageHeight / kFeatureGrid;  // 8
inline constexpr int kPatchDim = kPatchSize * kPatchSize * kImageChannels;  // 192
inline constexpr int kFeatureDim = 32;
inline constexpr int kVqaHidden = 64;

enum class VqaVariant { Monolithic, Attentive };

struct VqaVictim {
  VqaVariant variant = VqaVariant::Monolithic;
  ParamStore params;
};

VqaVictim make_vqa_victim(VqaVariant variant, std::uint64_t seed);

void save_vqa(const VqaVictim& model, const std::string& path);
VqaVictim load_vqa(const std::string& path);

// Forward-pass activations, kept for the analytic backward pass.
struct VqaActivations {
  Eigen::MatrixXd patches;  // kPatchDim x S^2, scaled to [-1, 1]
  Eigen::MatrixXd feats;    // kFeatureDim x S^2
  Eigen::VectorXd qvec;
  Eigen::VectorXd att;      // S^2 attention weights (attentive only)
  Eigen::VectorXd pooled;
  Eigen::VectorXd fused;
  Eigen::VectorXd hidden;
  Eigen::VectorXd logits;
  Probs probs;
};

VqaActivations vqa_forward(const VqaVictim& model, const Image& x, const Question& q);

inline std::pair<Probs, std::optional<AttentionMap>> forward_vqa(const VqaVictim& model,
                                                                 const Image& x,
                                                                 const Question& q) {
  VqaActivations acts = vqa_forward(model, x, q);
  std::optional<AttentionMap> att;
  if (model.variant == VqaVariant::Attentive) att = acts.att;
  return {std::move(acts.probs), std::move(att)};
}

// Argmax with ties broken toward the lowest index.
int argmax_lowest(const Eigen::VectorXd& v);
int predict_answer(const VqaVictim& model, const Image& x, const Question& q);

// Backpropagates d(objective)/d(logits) through the network. Either output
// may be null; param_grads accumulates (caller zeroes it).
void vqa_backward(const VqaVictim& model, const VqaActivations& acts, const Question& q,
                  const Eigen::VectorXd& dlogits, Gradient* pixel_grad, ParamStore* param_grads);

// d(objective)/d(logits) for an objective expressed on the softmax output.
Eigen::VectorXd softmax_pullback(const Probs& probs, const Eigen::VectorXd& dprobs);

// A scalar objective on the softmax output together with its gradient.
using ProbObjective = std::function<std::pair<double, Eigen::VectorXd>(const Probs&)>;

std::pair<double, Gradient> vqa_loss_grad(const VqaVictim& model, const Image& x,
                                          const Question& q, const ProbObjective& objective);

// ---- training --------------------------------------------------------------

struct TrainConfig {
  int epochs = 60;
  int batch_size = 32;
  double learning_rate = 3e-3;
  // Decoupled per-update decay applied to every parameter except the question
  // prior head and the question embeddings.
  double weight_decay = 1e-3;
  double target_accuracy = 0.95;
};

struct VqaTrainReport {
  VqaVictim model;
  std::vector<double> epoch_losses;
  double val_accuracy = 0.0;
  int epochs_run = 0;
};

double vqa_accuracy(const VqaVictim& model, const std::vector<VqaSample>& samples);

// Trains until target_accuracy is reached on the validation split; throws
// TrainingFailure (reporting the final accuracy) if the budget runs out.
VqaTrainReport train_vqa(const Corpus& corpus, VqaVariant variant, const TrainConfig& hyper,
                         std::uint64_t seed);

}  // namespace avlt
