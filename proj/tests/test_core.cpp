#include "avlt/core.hpp"

#include <doctest.h>

#include <cmath>

using namespace avlt;

TEST_CASE("pixel_index is row-major with interleaved channels") {
  CHECK(pixel_index(0, 0, 0) == 0);
  CHECK(pixel_index(0, 0, 2) == 2);
  CHECK(pixel_index(0, 1, 0) == 3);
  CHECK(pixel_index(1, 0, 0) == kImageWidth * kImageChannels);
  CHECK(pixel_index(31, 31, 2) == kImagePixels - 1);
}

TEST_CASE("clip_pixels clamps into [0, 255]") {
  Image x = make_image(100.0);
  x[0] = -5.0;
  x[1] = 300.0;
  x[2] = 255.0;
  x[3] = 0.0;
  const Image y = clip_pixels(x);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 255.0);
  CHECK(y[2] == 255.0);
  CHECK(y[3] == 0.0);
  CHECK(y[4] == 100.0);
  CHECK(y.minCoeff() >= 0.0);
  CHECK(y.maxCoeff() <= 255.0);
}

TEST_CASE("require_finite rejects NaN and infinity") {
  Eigen::ArrayXd ok = Eigen::ArrayXd::Constant(4, 1.5);
  CHECK_NOTHROW(require_finite(ok, "ok"));
  Eigen::ArrayXd bad = ok;
  bad[2] = std::nan("");
  CHECK_THROWS_AS(require_finite(bad, "bad"), NumericalError);
  bad[2] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(require_finite(bad, "bad"), NumericalError);
}

TEST_CASE("mix_seed is deterministic and separates nearby inputs") {
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
  CHECK(mix_seed(1, 2) != mix_seed(1, 3));
  CHECK(mix_seed(1, 2) != mix_seed(2, 2));
  CHECK(mix_seed(0, 0) != mix_seed(0, 1));
}
