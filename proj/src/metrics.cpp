#include "avlt/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace avlt {

double rmse(const Eigen::ArrayXd& x1, const Eigen::ArrayXd& x2) {
  if (x1.size() != x2.size()) throw InvalidArgument("rmse: shape mismatch");
  if (x1.size() == 0) throw InvalidArgument("rmse: empty input");
  return std::sqrt((x1 - x2).square().sum() / double(x1.size()));
}

double success_rate(const std::vector<bool>& successes) {
  if (successes.empty()) throw InvalidArgument("success_rate: empty input");
  const auto n = std::count(successes.begin(), successes.end(), true);
  return double(n) / double(successes.size());
}

double adversarial_probability(const VqaVictim& model, const Image& x_adv, const Question& q,
                               int y_target) {
  if (y_target < 0 || y_target >= kNumAnswers) {
    throw InvalidArgument("adversarial_probability: target out of range");
  }
  return vqa_forward(model, x_adv, q).probs[y_target];
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("empirical_cdf: empty input");
  std::sort(values.begin(), values.end());
  std::vector<CdfPoint> points;
  const double n = double(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    points.push_back({values[i], double(i + 1) / n});
  }
  return points;
}

std::vector<std::string> normalize_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string word;
  const auto flush = [&] {
    if (!word.empty()) {
      tokens.push_back(word);
      word.clear();
    }
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  flush();
  if (!tokens.empty() && tokens.back().size() > 1 && tokens.back().back() == '.') {
    tokens.back().pop_back();
  } else if (!tokens.empty() && tokens.back() == ".") {
    tokens.pop_back();
  }
  return tokens;
}

bool exact_match(const std::string& c1, const std::string& c2) {
  return normalize_tokens(c1) == normalize_tokens(c2);
}

namespace {

struct AlignSearch {
  const std::vector<std::string>* cand;
  const std::vector<std::string>* ref;
  int best_matches = 0;
  int best_chunks = 0;

  void dfs(std::size_t ci, std::uint32_t used, int matches, int chunks, int last_ref) {
    if (ci == cand->size()) {
      if (matches > best_matches || (matches == best_matches && chunks < best_chunks)) {
        best_matches = matches;
        best_chunks = chunks;
      }
      return;
    }
    // Leave this candidate token unaligned.
    dfs(ci + 1, used, matches, chunks, -2);
    for (std::size_t rj = 0; rj < ref->size(); ++rj) {
      if (used & (1u << rj)) continue;
      if ((*cand)[ci] != (*ref)[rj]) continue;
      const bool contiguous = static_cast<int>(rj) == last_ref + 1;
      dfs(ci + 1, used | (1u << rj), matches + 1, chunks + (contiguous ? 0 : 1),
          static_cast<int>(rj));
    }
  }
};

}  // namespace

std::pair<int, int> meteor_alignment(const std::vector<std::string>& candidate,
                                     const std::vector<std::string>& reference) {
  if (reference.size() > 31) throw InvalidArgument("meteor_alignment: reference too long");
  AlignSearch search{&candidate, &reference};
  search.dfs(0, 0, 0, 0, -2);
  return {search.best_matches, search.best_chunks};
}

double meteor(const std::string& candidate, const std::string& reference,
              const MatchConfig& cfg) {
  const auto cand = normalize_tokens(candidate);
  const auto ref = normalize_tokens(reference);
  if (cand.empty() || ref.empty()) throw InvalidArgument("meteor: empty caption");
  const auto [m, chunks] = meteor_alignment(cand, ref);
  if (m == 0) return 0.0;
  const double precision = double(m) / double(cand.size());
  const double recall = double(m) / double(ref.size());
  const double f = precision * recall / (cfg.alpha * precision + (1.0 - cfg.alpha) * recall);
  const double penalty = cfg.gamma * std::pow(double(chunks) / double(m), cfg.beta);
  return f * (1.0 - penalty);
}

bool caption_matches(const std::string& candidate, const std::string& reference,
                     const MatchConfig& cfg) {
  if (cfg.metric == MatchMetric::ExactMatch) return exact_match(candidate, reference);
  return meteor(candidate, reference, cfg) > cfg.omega;
}

TopKAccuracy topk_caption_accuracy(const std::string& target,
                                   const std::vector<std::string>& predictions, int k,
                                   const MatchConfig& cfg) {
  if (k < 1 || k > static_cast<int>(predictions.size())) {
    throw InvalidArgument("topk_caption_accuracy: K out of range");
  }
  TopKAccuracy out;
  int hits = 0;
  for (int i = 0; i < k; ++i) {
    if (caption_matches(predictions[i], target, cfg)) ++hits;
  }
  out.accuracy = double(hits) / double(k);

  MatchConfig failure_cfg;
  failure_cfg.metric = MatchMetric::MeteorAbove;
  failure_cfg.omega = 0.15;
  const int probe = std::min<int>(5, static_cast<int>(predictions.size()));
  out.failure = true;
  for (int i = 0; i < probe; ++i) {
    if (caption_matches(predictions[i], target, failure_cfg)) {
      out.failure = false;
      break;
    }
  }
  return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (double(i) + double(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("spearman: size mismatch");
  if (xs.size() < 3) throw InvalidArgument("spearman: need at least 3 pairs");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = double(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double cov = 0, vx = 0, vy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    cov += (rx[i] - mx) * (ry[i] - my);
    vx += (rx[i] - mx) * (rx[i] - mx);
    vy += (ry[i] - my) * (ry[i] - my);
  }
  if (vx == 0.0 || vy == 0.0) {
    throw InvalidArgument("spearman: a variable is constant, correlation undefined");
  }
  return cov / std::sqrt(vx * vy);
}

}  // namespace avlt
