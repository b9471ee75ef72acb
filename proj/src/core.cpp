#include "avlt/core.hpp"

#include <cmath>

namespace avlt {

Image clip_pixels(const Image& x) {
  return x.max(kPixelMin).min(kPixelMax);
}

void require_finite(const Eigen::ArrayXd& values, const char* what) {
  if (!values.isFinite().all()) {
    throw NumericalError(std::string("non-finite values in ") + what);
  }
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace avlt
