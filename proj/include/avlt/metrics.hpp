#pragma once

#include "avlt/core.hpp"
#include "avlt/vocab.hpp"
#include "avlt/vqa.hpp"

#include <string>
#include <vector>

namespace avlt {

// RMSE distance: ||x1 - x2||_2 / sqrt(N).
double rmse(const Eigen::ArrayXd& x1, const Eigen::ArrayXd& x2);

double success_rate(const std::vector<bool>& successes);

// Target coordinate of a fresh forward pass on the adversarial image.
double adversarial_probability(const VqaVictim& model, const Image& x_adv, const Question& q,
                               int y_target);

struct CdfPoint {
  double value = 0.0;
  double fraction = 0.0;  // P[X <= value]
};

// Sorted ascending, duplicates collapsed, final fraction exactly 1.
std::vector<CdfPoint> empirical_cdf(std::vector<double> values);

// ---- caption matching ------------------------------------------------------

enum class MatchMetric { ExactMatch, MeteorAbove };

struct MatchConfig {
  MatchMetric metric = MatchMetric::ExactMatch;
  double omega = 0.15;
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};

// Lowercase, collapse whitespace, strip a trailing period.
std::vector<std::string> normalize_tokens(const std::string& text);

bool exact_match(const std::string& c1, const std::string& c2);

// Unigram-exact METEOR: maximal matching with minimal chunk count,
// F = P*R / (alpha*P + (1-alpha)*R), penalty = gamma * (chunks/m)^beta.
double meteor(const std::string& candidate, const std::string& reference,
              const MatchConfig& cfg = {});

// Match count and minimal chunk count of a maximal unigram alignment.
std::pair<int, int> meteor_alignment(const std::vector<std::string>& candidate,
                                     const std::vector<std::string>& reference);

bool caption_matches(const std::string& candidate, const std::string& reference,
                     const MatchConfig& cfg);

struct TopKAccuracy {
  double accuracy = 0.0;
  bool failure = false;  // no top-5 prediction matches under METEOR > 0.15
};

TopKAccuracy topk_caption_accuracy(const std::string& target,
                                   const std::vector<std::string>& predictions, int k,
                                   const MatchConfig& cfg);

// Spearman rank correlation with average-rank tie handling; needs >= 3 pairs.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace avlt
