#pragma once

#include "avlt/core.hpp"
#include "avlt/params.hpp"
#include "avlt/regions.hpp"
#include "avlt/scenes.hpp"
#include "avlt/vocab.hpp"

#include <array>
#include <utility>
#include <vector>

namespace avlt {

inline constexpr int kRegionDim = 16 * 16 * kImageChannels;  // 768
inline constexpr int kCapHidden = 32;

// Fixed-region dense captioner: a shared linear+tanh region encoder feeding
// a plain recurrent decoder. Regions are never predicted, only captioned.
struct DenseCapVictim {
  ParamStore params;
  std::array<RegionSpec, kNumRegions> regions = fixed_regions();
};

DenseCapVictim make_captioner(std::uint64_t seed);

void save_captioner(const DenseCapVictim& model, const std::string& path);
DenseCapVictim load_captioner(const std::string& path);

// Region pixels as a scaled feature vector: quadrants are taken verbatim,
// the full frame is 2x2 mean-pooled to the same 16x16 layout.
Eigen::VectorXd region_input(const Image& x, int region_index);

// Greedy (argmax, lowest-index tie) decode of one region, terminating at the
// end token or kCaptionMaxLen.
Caption decode_region(const DenseCapVictim& model, const Image& x, int region_index);

// All five (region, caption) pairs in fixed confidence order.
std::vector<std::pair<RegionSpec, Caption>> decode_dense_captions(const DenseCapVictim& model,
                                                                  const Image& x);

// Teacher-forced cross-entropy of the target caption summed over every
// region and caption position, with the analytic pixel gradient.
std::pair<double, Gradient> densecap_teacher_loss(const DenseCapVictim& model, const Image& x,
                                                  const Caption& target);
double densecap_teacher_loss_value(const DenseCapVictim& model, const Image& x,
                                   const Caption& target);

// Teacher-forced cross-entropy of the target at a single region.
double region_teacher_loss_value(const DenseCapVictim& model, const Image& x, int region_index,
                                 const Caption& target);

// ---- training --------------------------------------------------------------

struct CapTrainConfig {
  int epochs = 60;
  int batch_size = 16;
  double learning_rate = 3e-3;
  double target_exact_match = 0.90;
};

struct CapTrainReport {
  DenseCapVictim model;
  std::vector<double> epoch_losses;
  double val_exact_match = 0.0;
  int epochs_run = 0;
};

// Exact-match rate of greedy decodes against ground-truth region captions.
double captioner_exact_match(const DenseCapVictim& model, const std::vector<SceneSpec>& scenes);

CapTrainReport train_captioner(const std::vector<SceneSpec>& train_scenes,
                               const std::vector<SceneSpec>& val_scenes,
                               const CapTrainConfig& hyper, std::uint64_t seed);

}  // namespace avlt
