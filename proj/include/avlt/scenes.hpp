#pragma once

#include "avlt/core.hpp"
#include "avlt/regions.hpp"
#include "avlt/vocab.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace avlt {

struct SceneObject {
  Shape shape = Shape::Circle;
  Color color = Color::Red;
  Position position = Position::Center;

  bool operator==(const SceneObject& other) const = default;
};

struct SceneSpec {
  std::vector<SceneObject> objects;  // 1..3, distinct positions
  std::uint64_t seed = 0;            // drives the rendering noise

  bool operator==(const SceneSpec& other) const = default;
};

void validate_scene(const SceneSpec& spec);

// Deterministic 32x32x3 rasterization: gray 128 background, pure palette
// colors, seeded +-5 pixel noise, clipped to [0, 255].
Image render_scene(const SceneSpec& spec);

SceneSpec random_scene(std::uint64_t seed);

// Pixel center of a rendered object.
void position_center(Position p, int& row, int& col);

// Quadrant index (0 TL, 1 TR, 2 BL, 3 BR) containing the object's center.
int object_quadrant(Position p);

// Ground-truth caption for one of the five fixed regions.
Caption region_ground_truth(const SceneSpec& spec, int region_index);
std::array<Caption, kNumRegions> region_captions(const SceneSpec& spec);

// ---- question/answer corpus ------------------------------------------------

struct VqaSample {
  SceneSpec scene;
  Question question;
  int answer = 0;
};

struct Corpus {
  std::vector<VqaSample> train;
  std::vector<VqaSample> val;
  std::vector<SceneSpec> train_scenes;
  std::vector<SceneSpec> val_scenes;
};

// Ground-truth answer, if the question is well posed for the scene.
std::optional<int> ground_truth_answer(const SceneSpec& spec, const Question& q);

// All well-posed questions for a scene, one existence probe drawn with the
// configured yes-rate skew (the corpus-level language prior).
std::vector<VqaSample> scene_samples(const SceneSpec& spec, double yes_rate,
                                     std::uint64_t stream_seed);

inline constexpr double kExistenceYesRate = 0.7;

Corpus generate_dataset(int n_train_scenes, int n_val_scenes, std::uint64_t seed);

// Binary PPM (P6, maxval 255, row-major RGB), nearest-int pixel rounding.
void write_ppm(const Image& image, const std::string& path);
Image read_ppm(const std::string& path);

}  // namespace avlt
