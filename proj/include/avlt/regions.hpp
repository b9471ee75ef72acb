#pragma once

#include "avlt/core.hpp"

#include <array>

namespace avlt {

struct RegionSpec {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // [x0,x1) x [y0,y1), x = column, y = row

  bool operator==(const RegionSpec& other) const = default;
};

inline constexpr int kNumRegions = 5;

// The captioner's fixed region set, in fixed confidence order:
// four 16x16 quadrants (TL, TR, BL, BR) then the full frame.
inline std::array<RegionSpec, kNumRegions> fixed_regions() {
  constexpr int h = kImageHeight / 2;
  constexpr int w = kImageWidth / 2;
  return {RegionSpec{0, 0, w, h}, RegionSpec{w, 0, kImageWidth, h},
          RegionSpec{0, h, w, kImageHeight}, RegionSpec{w, h, kImageWidth, kImageHeight},
          RegionSpec{0, 0, kImageWidth, kImageHeight}};
}

inline void validate_region(const RegionSpec& r) {
  if (!(0 <= r.x0 && r.x0 < r.x1 && r.x1 <= kImageWidth) ||
      !(0 <= r.y0 && r.y0 < r.y1 && r.y1 <= kImageHeight)) {
    throw InvalidArgument("invalid region bounds");
  }
}

}  // namespace avlt
