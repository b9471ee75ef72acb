#include "avlt/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace avlt {

namespace {

constexpr double kBackground = 128.0;
constexpr double kNoiseAmplitude = 5.0;

void palette_rgb(Color c, double rgb[3]) {
  switch (c) {
    case Color::Red: rgb[0] = 255; rgb[1] = 0; rgb[2] = 0; break;
    case Color::Green: rgb[0] = 0; rgb[1] = 255; rgb[2] = 0; break;
    case Color::Blue: rgb[0] = 0; rgb[1] = 0; rgb[2] = 255; break;
    case Color::Yellow: rgb[0] = 255; rgb[1] = 255; rgb[2] = 0; break;
  }
}

bool inside_shape(Shape s, int dr, int dc) {
  switch (s) {
    case Shape::Circle:
      return dr * dr + dc * dc <= 16;
    case Shape::Square:
      return dr >= -4 && dr <= 3 && dc >= -4 && dc <= 3;
    case Shape::Triangle: {
      if (dr < -4 || dr > 4) return false;
      const int half = (dr + 4) / 2;
      return dc >= -half && dc <= half;
    }
  }
  return false;
}

int count_in_region(const SceneSpec& spec, int region_index) {
  if (region_index == kNumRegions - 1) return static_cast<int>(spec.objects.size());
  int n = 0;
  for (const auto& obj : spec.objects) {
    if (object_quadrant(obj.position) == region_index) ++n;
  }
  return n;
}

}  // namespace

void validate_scene(const SceneSpec& spec) {
  if (spec.objects.empty() || spec.objects.size() > kMaxObjects) {
    throw InvalidArgument("scene must contain 1..3 objects");
  }
  std::set<Position> seen;
  for (const auto& obj : spec.objects) {
    if (!seen.insert(obj.position).second) {
      throw InvalidArgument("scene positions must be distinct");
    }
  }
}

void position_center(Position p, int& row, int& col) {
  switch (p) {
    case Position::Left: row = 15; col = 7; break;
    case Position::Right: row = 16; col = 24; break;
    case Position::Top: row = 7; col = 16; break;
    case Position::Bottom: row = 24; col = 15; break;
    case Position::Center: row = 16; col = 16; break;
  }
}

int object_quadrant(Position p) {
  int row, col;
  position_center(p, row, col);
  return (row >= kImageHeight / 2 ? 2 : 0) + (col >= kImageWidth / 2 ? 1 : 0);
}

Image render_scene(const SceneSpec& spec) {
  validate_scene(spec);
  Image image = make_image(kBackground);
  for (const auto& obj : spec.objects) {
    int cy, cx;
    position_center(obj.position, cy, cx);
    double rgb[3];
    palette_rgb(obj.color, rgb);
    for (int dr = -4; dr <= 4; ++dr) {
      for (int dc = -4; dc <= 4; ++dc) {
        if (!inside_shape(obj.shape, dr, dc)) continue;
        const int r = cy + dr;
        const int c = cx + dc;
        if (r < 0 || r >= kImageHeight || c < 0 || c >= kImageWidth) continue;
        for (int ch = 0; ch < kImageChannels; ++ch) {
          image[pixel_index(r, c, ch)] = rgb[ch];
        }
      }
    }
  }
  auto rng = make_rng(mix_seed(spec.seed, 0x6e6f697365));
  std::uniform_real_distribution<double> noise(-kNoiseAmplitude, kNoiseAmplitude);
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    image[i] += noise(rng);
  }
  return clip_pixels(image);
}

SceneSpec random_scene(std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_int_distribution<int> count_dist(1, kMaxObjects);
  std::uniform_int_distribution<int> color_dist(0, kNumColors - 1);
  std::uniform_int_distribution<int> shape_dist(0, kNumShapes - 1);
  const int n = count_dist(rng);
  std::vector<int> positions = {0, 1, 2, 3, 4};
  for (int i = static_cast<int>(positions.size()) - 1; i > 0; --i) {
    std::uniform_int_distribution<int> pick(0, i);
    std::swap(positions[i], positions[pick(rng)]);
  }
  SceneSpec spec;
  spec.seed = seed;
  for (int i = 0; i < n; ++i) {
    spec.objects.push_back({static_cast<Shape>(shape_dist(rng)),
                            static_cast<Color>(color_dist(rng)),
                            static_cast<Position>(positions[i])});
  }
  return spec;
}

Caption region_ground_truth(const SceneSpec& spec, int region_index) {
  if (region_index < 0 || region_index >= kNumRegions) {
    throw InvalidArgument("region index out of range");
  }
  const int n = count_in_region(spec, region_index);
  if (n == 0) return caption_from_words({"empty", "gray", "region"});
  if (n == 1) {
    const SceneObject* single = nullptr;
    for (const auto& obj : spec.objects) {
      if (region_index == kNumRegions - 1 || object_quadrant(obj.position) == region_index) {
        single = &obj;
        break;
      }
    }
    return caption_from_words({"a", color_name(single->color), shape_name(single->shape)});
  }
  return caption_from_words({n == 2 ? "two" : "three", "objects"});
}

std::array<Caption, kNumRegions> region_captions(const SceneSpec& spec) {
  std::array<Caption, kNumRegions> out;
  for (int i = 0; i < kNumRegions; ++i) out[i] = region_ground_truth(spec, i);
  return out;
}

std::optional<int> ground_truth_answer(const SceneSpec& spec, const Question& q) {
  const auto count_shape = [&](Shape s) {
    return std::count_if(spec.objects.begin(), spec.objects.end(),
                         [&](const SceneObject& o) { return o.shape == s; });
  };
  const auto count_color = [&](Color c) {
    return std::count_if(spec.objects.begin(), spec.objects.end(),
                         [&](const SceneObject& o) { return o.color == c; });
  };
  switch (q.template_category) {
    case QuestionCategory::Count:
      return answer_of_count(static_cast<int>(spec.objects.size()));
    case QuestionCategory::Color: {
      const Shape s = static_cast<Shape>(q.token_ids.back() - 17);
      if (count_shape(s) != 1) return std::nullopt;
      for (const auto& obj : spec.objects) {
        if (obj.shape == s) return answer_of_color(obj.color);
      }
      return std::nullopt;
    }
    case QuestionCategory::Shape: {
      const Color c = static_cast<Color>(q.token_ids[4] - 13);
      if (count_color(c) != 1) return std::nullopt;
      for (const auto& obj : spec.objects) {
        if (obj.color == c) return answer_of_shape(obj.shape);
      }
      return std::nullopt;
    }
    case QuestionCategory::Existence: {
      const Color c = static_cast<Color>(q.token_ids[3] - 13);
      const Shape s = static_cast<Shape>(q.token_ids[4] - 17);
      for (const auto& obj : spec.objects) {
        if (obj.color == c && obj.shape == s) return answer_yes();
      }
      return answer_no();
    }
    case QuestionCategory::Position: {
      const Shape s = static_cast<Shape>(q.token_ids.back() - 17);
      if (count_shape(s) != 1) return std::nullopt;
      for (const auto& obj : spec.objects) {
        if (obj.shape == s) return answer_of_position(obj.position);
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::vector<VqaSample> scene_samples(const SceneSpec& spec, double yes_rate,
                                     std::uint64_t stream_seed) {
  std::vector<VqaSample> out;
  const auto add = [&](const Question& q) {
    if (auto a = ground_truth_answer(spec, q)) out.push_back({spec, q, *a});
  };
  add(make_count_question());
  for (int s = 0; s < kNumShapes; ++s) {
    add(make_color_question(static_cast<Shape>(s)));
    add(make_position_question(static_cast<Shape>(s)));
  }
  for (int c = 0; c < kNumColors; ++c) {
    add(make_shape_question(static_cast<Color>(c)));
  }

  // One existence probe per scene, present with probability yes_rate.
  auto rng = make_rng(mix_seed(stream_seed, 0x6578697374));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  if (uni(rng) < yes_rate) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(spec.objects.size()) - 1);
    const auto& obj = spec.objects[pick(rng)];
    add(make_existence_question(obj.color, obj.shape));
  } else {
    std::vector<std::pair<Color, Shape>> absent;
    for (int c = 0; c < kNumColors; ++c) {
      for (int s = 0; s < kNumShapes; ++s) {
        const bool present = std::any_of(spec.objects.begin(), spec.objects.end(),
                                         [&](const SceneObject& o) {
                                           return o.color == static_cast<Color>(c) &&
                                                  o.shape == static_cast<Shape>(s);
                                         });
        if (!present) absent.push_back({static_cast<Color>(c), static_cast<Shape>(s)});
      }
    }
    std::uniform_int_distribution<int> pick(0, static_cast<int>(absent.size()) - 1);
    const auto [c, s] = absent[pick(rng)];
    add(make_existence_question(c, s));
  }
  return out;
}

Corpus generate_dataset(int n_train_scenes, int n_val_scenes, std::uint64_t seed) {
  if (n_train_scenes <= 0 || n_val_scenes <= 0) {
    throw InvalidArgument("generate_dataset: scene counts must be positive");
  }
  Corpus corpus;
  for (int i = 0; i < n_train_scenes; ++i) {
    SceneSpec spec = random_scene(mix_seed(seed, 0x10000 + i));
    corpus.train_scenes.push_back(spec);
    auto samples = scene_samples(spec, kExistenceYesRate, mix_seed(seed, 0x20000 + i));
    corpus.train.insert(corpus.train.end(), samples.begin(), samples.end());
  }
  for (int i = 0; i < n_val_scenes; ++i) {
    SceneSpec spec = random_scene(mix_seed(seed, 0x4000000 + i));
    corpus.val_scenes.push_back(spec);
    auto samples = scene_samples(spec, kExistenceYesRate, mix_seed(seed, 0x5000000 + i));
    corpus.val.insert(corpus.val.end(), samples.begin(), samples.end());
  }
  return corpus;
}

void write_ppm(const Image& image, const std::string& path) {
  if (image.size() != kImagePixels) throw InvalidArgument("write_ppm: bad image size");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InvalidArgument("write_ppm: cannot open " + path);
  os << "P6\n" << kImageWidth << ' ' << kImageHeight << "\n255\n";
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    const double v = std::min(kPixelMax, std::max(kPixelMin, image[i]));
    os.put(static_cast<char>(static_cast<unsigned char>(std::lround(v))));
  }
}

Image read_ppm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("read_ppm: cannot open " + path);
  std::string magic;
  int w, h, maxval;
  is >> magic >> w >> h >> maxval;
  if (magic != "P6" || w != kImageWidth || h != kImageHeight || maxval != 255) {
    throw InvalidArgument("read_ppm: unsupported PPM header in " + path);
  }
  is.get();  // single whitespace after header
  Image image = make_image();
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    const int c = is.get();
    if (c == EOF) throw InvalidArgument("read_ppm: truncated file " + path);
    image[i] = static_cast<double>(c);
  }
  return image;
}

}  // namespace avlt
