#pragma once

#include "avlt/captioner.hpp"
#include "avlt/core.hpp"
#include "avlt/metrics.hpp"
#include "avlt/optim.hpp"
#include "avlt/vqa.hpp"

#include <cmath>
#include <vector>

namespace avlt {

// How the caption attack penalizes distance: the bounded ReLU form shared
// with the VQA attack, or an unbounded lambda * d(x, x0) term.
enum class DistanceMode { BoundedRelu, PlainLambda };

struct AttackConfig {
  double bound = 20.0;    // B, RMSE bound
  double eps = 2.0;       // slack inside the ReLU hinge
  double lambda1 = 1.0;
  double lambda2 = 10.0;
  double tau = std::log(double(kNumAnswers));
  double eta = 1.0;
  int maxitr = 1000;
  int min_iter = 50;      // earliest success return
  int restarts = 3;
  OptimizerKind optimizer = OptimizerKind::Adam;
  bool record_trace = false;
  DistanceMode caption_distance = DistanceMode::BoundedRelu;
  double plain_lambda = 0.1;

  void validate() const;
};

struct CwConfig {
  double lambda = 0.1;    // distance weight
  double eta = 0.01;
  int maxitr = 1000;
  int min_iter = 50;
  int restarts = 3;

  void validate() const;
};

struct ObjectiveBreakdown {
  double term1 = 0.0;  // target cross-entropy
  double term2 = 0.0;  // lambda1-weighted non-target suppression
  double term3 = 0.0;  // lambda2-weighted distance hinge
  int y_pred = 0;

  double total() const { return term1 + term2 + term3; }
};

struct AttackResult {
  Image image;
  bool success = false;
  double adversarial_probability = 0.0;
  int iterations_used = 0;
  double final_rmse = 0.0;
  std::vector<ObjectiveBreakdown> trace;   // per-iteration, when recorded
  std::vector<Caption> decoded;            // caption attacks: all 5 regions
};

inline constexpr double kProbFloor = 1e-12;

// The three-term attack objective evaluated at one iterate.
ObjectiveBreakdown eval_xi(const Probs& probs, int y_target, int y_pred, double d,
                           const AttackConfig& cfg);

// True iff lambda2 * eps > loss_at_source + lambda1 * tau; when true, the
// optimum of the attack objective is guaranteed to stay within the bound.
bool check_theorem2(const AttackConfig& cfg, double loss_at_source);

// Iterative targeted attack with random start, early success return after
// min_iter iterations, optimizer update, and pixel clipping.
AttackResult attack_vqa(const VqaVictim& model, const Image& x, const Question& q, int y_target,
                        const AttackConfig& cfg, std::uint64_t seed);

// Runs attack_vqa with derived seeds; any success beats any failure, ties
// broken by the higher target probability.
AttackResult attack_with_restarts(const VqaVictim& model, const Image& x, const Question& q,
                                  int y_target, const AttackConfig& cfg, std::uint64_t seed);

// Baseline margin-loss attack over a tanh-reparameterized perturbation, so
// pixels stay inside (0, 255) by construction.
AttackResult attack_cw(const VqaVictim& model, const Image& x, const Question& q, int y_target,
                       const CwConfig& cfg, std::uint64_t seed);

AttackResult attack_cw_with_restarts(const VqaVictim& model, const Image& x, const Question& q,
                                     int y_target, const CwConfig& cfg, std::uint64_t seed);

// Caption attack: drives the teacher-forced loss of the target caption down
// for every region; success is an exact top-1 greedy-decode match. The
// adversarial_probability field holds the decoder's probability of the
// target caption at the top-1 region.
AttackResult attack_densecap(const DenseCapVictim& model, const Image& x, const Caption& target,
                             const AttackConfig& cfg, std::uint64_t seed);

}  // namespace avlt
