#include "avlt/captioner.hpp"

#include "avlt/optim.hpp"
#include "avlt/vqa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace avlt {

namespace {

constexpr double kPixelScale = 128.0;
constexpr double kProbFloor = 1e-12;

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

// Teacher-forced pass over one region; returns the loss and optionally the
// gradient with respect to the region input and the parameters.
double region_teacher_pass(const DenseCapVictim& model, const Eigen::VectorXd& z,
                           const Caption& target, Eigen::VectorXd* dz,
                           ParamStore* param_grads) {
  const auto& p = model.params;
  const int T = static_cast<int>(target.token_ids.size());

  const Eigen::VectorXd pre_r = p.at("reg_w") * z + p.at("reg_b").col(0);
  const Eigen::VectorXd r = pre_r.array().tanh();

  std::vector<Eigen::VectorXd> h(T + 1), xin(T + 1), probs(T + 1);
  h[0] = r;
  double loss = 0.0;
  for (int t = 1; t <= T; ++t) {
    if (t == 1) {
      xin[t] = p.at("start_emb").col(0);
    } else {
      xin[t] = p.at("c_embed").row(target.token_ids[t - 2]).transpose();
    }
    const Eigen::VectorXd pre =
        p.at("whh") * h[t - 1] + p.at("wxh") * xin[t] + p.at("bh").col(0);
    h[t] = pre.array().tanh();
    probs[t] = stable_softmax(p.at("wo") * h[t] + p.at("bo").col(0));
    loss += -std::log(std::max(probs[t][target.token_ids[t - 1]], kProbFloor));
  }
  if (!dz && !param_grads) return loss;

  std::vector<Eigen::VectorXd> dh(T + 1, Eigen::VectorXd::Zero(kCapHidden));
  for (int t = T; t >= 1; --t) {
    Eigen::VectorXd dlogit = probs[t];
    dlogit[target.token_ids[t - 1]] -= 1.0;
    if (param_grads) {
      param_grads->at("wo") += dlogit * h[t].transpose();
      param_grads->at("bo").col(0) += dlogit;
    }
    dh[t] += p.at("wo").transpose() * dlogit;
    const Eigen::VectorXd dpre =
        dh[t].cwiseProduct((1.0 - h[t].array().square()).matrix());
    if (param_grads) {
      param_grads->at("whh") += dpre * h[t - 1].transpose();
      param_grads->at("wxh") += dpre * xin[t].transpose();
      param_grads->at("bh").col(0) += dpre;
      const Eigen::VectorXd dx = p.at("wxh").transpose() * dpre;
      if (t == 1) {
        param_grads->at("start_emb").col(0) += dx;
      } else {
        param_grads->at("c_embed").row(target.token_ids[t - 2]) += dx.transpose();
      }
    }
    dh[t - 1] += p.at("whh").transpose() * dpre;
  }

  const Eigen::VectorXd dpre_r = dh[0].cwiseProduct((1.0 - r.array().square()).matrix());
  if (param_grads) {
    param_grads->at("reg_w") += dpre_r * z.transpose();
    param_grads->at("reg_b").col(0) += dpre_r;
  }
  if (dz) *dz = p.at("reg_w").transpose() * dpre_r;
  return loss;
}

// Scatter a region-input gradient back into pixel space.
void scatter_region_grad(const Eigen::VectorXd& dz, int region_index, Gradient& pixel_grad) {
  if (region_index < kNumRegions - 1) {
    const auto regions = fixed_regions();
    const RegionSpec& reg = regions[region_index];
    int k = 0;
    for (int r = reg.y0; r < reg.y1; ++r) {
      for (int c = reg.x0; c < reg.x1; ++c) {
        for (int ch = 0; ch < kImageChannels; ++ch) {
          pixel_grad[pixel_index(r, c, ch)] += dz[k++] / kPixelScale;
        }
      }
    }
  } else {
    int k = 0;
    for (int r = 0; r < kImageHeight; r += 2) {
      for (int c = 0; c < kImageWidth; c += 2) {
        for (int ch = 0; ch < kImageChannels; ++ch) {
          const double share = dz[k++] / (4.0 * kPixelScale);
          pixel_grad[pixel_index(r, c, ch)] += share;
          pixel_grad[pixel_index(r, c + 1, ch)] += share;
          pixel_grad[pixel_index(r + 1, c, ch)] += share;
          pixel_grad[pixel_index(r + 1, c + 1, ch)] += share;
        }
      }
    }
  }
}

}  // namespace

DenseCapVictim make_captioner(std::uint64_t seed) {
  DenseCapVictim model;
  auto& p = model.params;
  p.add("reg_w", kCapHidden, kRegionDim);
  p.add("reg_b", kCapHidden, 1);
  p.add("start_emb", kCapHidden, 1);
  p.add("c_embed", kCaptionVocab, kCapHidden);
  p.add("whh", kCapHidden, kCapHidden);
  p.add("wxh", kCapHidden, kCapHidden);
  p.add("bh", kCapHidden, 1);
  p.add("wo", kCaptionVocab, kCapHidden);
  p.add("bo", kCaptionVocab, 1);
  auto rng = make_rng(mix_seed(seed, 0x636170));
  init_gaussian(p.at("reg_w"), rng, 1.0 / std::sqrt(double(kRegionDim)));
  init_gaussian(p.at("start_emb"), rng, 0.5);
  init_gaussian(p.at("c_embed"), rng, 0.5);
  init_gaussian(p.at("whh"), rng, 0.5 / std::sqrt(double(kCapHidden)));
  init_gaussian(p.at("wxh"), rng, 1.0 / std::sqrt(double(kCapHidden)));
  init_gaussian(p.at("wo"), rng, 1.0 / std::sqrt(double(kCapHidden)));
  return model;
}

void save_captioner(const DenseCapVictim& model, const std::string& path) {
  save_params(model.params, path);
}

DenseCapVictim load_captioner(const std::string& path) {
  DenseCapVictim model;
  model.params = load_params(path);
  return model;
}

Eigen::VectorXd region_input(const Image& x, int region_index) {
  if (x.size() != kImagePixels) throw InvalidArgument("image has wrong size");
  if (region_index < 0 || region_index >= kNumRegions) {
    throw InvalidArgument("region index out of range");
  }
  Eigen::VectorXd z(kRegionDim);
  if (region_index < kNumRegions - 1) {
    const auto regions = fixed_regions();
    const RegionSpec& reg = regions[region_index];
    int k = 0;
    for (int r = reg.y0; r < reg.y1; ++r) {
      for (int c = reg.x0; c < reg.x1; ++c) {
        for (int ch = 0; ch < kImageChannels; ++ch) {
          z[k++] = (x[pixel_index(r, c, ch)] - kPixelScale) / kPixelScale;
        }
      }
    }
  } else {
    int k = 0;
    for (int r = 0; r < kImageHeight; r += 2) {
      for (int c = 0; c < kImageWidth; c += 2) {
        for (int ch = 0; ch < kImageChannels; ++ch) {
          const double mean = (x[pixel_index(r, c, ch)] + x[pixel_index(r, c + 1, ch)] +
                               x[pixel_index(r + 1, c, ch)] + x[pixel_index(r + 1, c + 1, ch)]) /
                              4.0;
          z[k++] = (mean - kPixelScale) / kPixelScale;
        }
      }
    }
  }
  return z;
}

Caption decode_region(const DenseCapVictim& model, const Image& x, int region_index) {
  const auto& p = model.params;
  const Eigen::VectorXd z = region_input(x, region_index);
  Eigen::VectorXd h = (p.at("reg_w") * z + p.at("reg_b").col(0)).array().tanh();
  Eigen::VectorXd input = p.at("start_emb").col(0);
  Caption caption;
  for (int t = 0; t < kCaptionMaxLen; ++t) {
    h = (p.at("whh") * h + p.at("wxh") * input + p.at("bh").col(0)).array().tanh();
    const Eigen::VectorXd logits = p.at("wo") * h + p.at("bo").col(0);
    const int tok = argmax_lowest(logits);
    caption.token_ids.push_back(tok);
    if (tok == kCaptionEnd) break;
    input = p.at("c_embed").row(tok).transpose();
  }
  validate_caption(caption);
  return caption;
}

std::vector<std::pair<RegionSpec, Caption>> decode_dense_captions(const DenseCapVictim& model,
                                                                  const Image& x) {
  std::vector<std::pair<RegionSpec, Caption>> out;
  for (int i = 0; i < kNumRegions; ++i) {
    out.emplace_back(model.regions[i], decode_region(model, x, i));
  }
  return out;
}

double region_teacher_loss_value(const DenseCapVictim& model, const Image& x, int region_index,
                                 const Caption& target) {
  validate_caption(target);
  return region_teacher_pass(model, region_input(x, region_index), target, nullptr, nullptr);
}

double densecap_teacher_loss_value(const DenseCapVictim& model, const Image& x,
                                   const Caption& target) {
  validate_caption(target);
  double loss = 0.0;
  for (int i = 0; i < kNumRegions; ++i) {
    loss += region_teacher_pass(model, region_input(x, i), target, nullptr, nullptr);
  }
  return loss;
}

std::pair<double, Gradient> densecap_teacher_loss(const DenseCapVictim& model, const Image& x,
                                                  const Caption& target) {
  validate_caption(target);
  double loss = 0.0;
  Gradient grad = Gradient::Zero(kImagePixels);
  for (int i = 0; i < kNumRegions; ++i) {
    Eigen::VectorXd dz;
    loss += region_teacher_pass(model, region_input(x, i), target, &dz, nullptr);
    scatter_region_grad(dz, i, grad);
  }
  if (!std::isfinite(loss)) throw NumericalError("densecap_teacher_loss: non-finite loss");
  require_finite(grad, "densecap pixel gradient");
  return {loss, grad};
}

double captioner_exact_match(const DenseCapVictim& model, const std::vector<SceneSpec>& scenes) {
  if (scenes.empty()) throw InvalidArgument("captioner_exact_match: empty scene set");
  int total = 0, hits = 0;
  for (const auto& scene : scenes) {
    const Image image = render_scene(scene);
    const auto truth = region_captions(scene);
    for (int i = 0; i < kNumRegions; ++i) {
      ++total;
      if (decode_region(model, image, i) == truth[i]) ++hits;
    }
  }
  return double(hits) / double(total);
}

CapTrainReport train_captioner(const std::vector<SceneSpec>& train_scenes,
                               const std::vector<SceneSpec>& val_scenes,
                               const CapTrainConfig& hyper, std::uint64_t seed) {
  if (train_scenes.empty() || val_scenes.empty()) {
    throw InvalidArgument("train_captioner: scene sets must be non-empty");
  }
  CapTrainReport report;
  report.model = make_captioner(seed);
  auto& params = report.model.params;

  std::map<std::string, OptimizerState> opt;
  for (const auto& [name, m] : params) opt[name] = OptimizerState::make(OptimizerKind::Adam);

  std::vector<std::array<Eigen::VectorXd, kNumRegions>> inputs(train_scenes.size());
  std::vector<std::array<Caption, kNumRegions>> truths(train_scenes.size());
  for (std::size_t i = 0; i < train_scenes.size(); ++i) {
    const Image image = render_scene(train_scenes[i]);
    for (int r = 0; r < kNumRegions; ++r) inputs[i][r] = region_input(image, r);
    truths[i] = region_captions(train_scenes[i]);
  }

  auto rng = make_rng(mix_seed(seed, 0x636170747261696e));
  std::vector<int> order(train_scenes.size());
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
        const int idx = order[j];
        for (int r = 0; r < kNumRegions; ++r) {
          epoch_loss +=
              region_teacher_pass(report.model, inputs[idx][r], truths[idx][r], nullptr, &grads);
        }
      }
      const double inv = 1.0 / double(stop - start);
      for (auto& [name, g] : grads) {
        Eigen::Map<Eigen::ArrayXd> var(params.at(name).data(), params.at(name).size());
        Eigen::Map<Eigen::ArrayXd> gv(g.data(), g.size());
        var = optimizer_step(opt[name], var, gv * inv, hyper.learning_rate);
      }
    }
    report.epoch_losses.push_back(epoch_loss / double(train_scenes.size()));
    report.epochs_run = epoch + 1;
    report.val_exact_match = captioner_exact_match(report.model, val_scenes);
    if (report.val_exact_match >= hyper.target_exact_match) break;
  }
  if (report.val_exact_match < hyper.target_exact_match) {
    throw TrainingFailure("train_captioner: exact-match " +
                          std::to_string(report.val_exact_match) + " below target " +
                          std::to_string(hyper.target_exact_match));
  }
  params.check_finite();
  return report;
}

}  // namespace avlt
