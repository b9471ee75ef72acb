#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace avlt {

// Fixed toy image geometry: 32x32 RGB, pixel values in [0, 255].
inline constexpr int kImageHeight = 32;
inline constexpr int kImageWidth = 32;
inline constexpr int kImageChannels = 3;
inline constexpr int kImagePixels = kImageHeight * kImageWidth * kImageChannels;

inline constexpr double kPixelMin = 0.0;
inline constexpr double kPixelMax = 255.0;

// Images and per-pixel gradients are flat arrays in (row, col, channel) order.
using Image = Eigen::ArrayXd;
using Gradient = Eigen::ArrayXd;

inline int pixel_index(int row, int col, int channel) {
  return (row * kImageWidth + col) * kImageChannels + channel;
}

inline Image make_image(double fill = 0.0) {
  return Image::Constant(kImagePixels, fill);
}

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainingFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Clamp every value into the valid pixel range.
Image clip_pixels(const Image& x);

void require_finite(const Eigen::ArrayXd& values, const char* what);

// SplitMix64 finalizer; used to derive independent per-task seeds from
// (experiment seed, task index) so results do not depend on scheduling.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace avlt
