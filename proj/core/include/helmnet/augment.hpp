#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "helmnet/image.hpp"
#include "helmnet/rng.hpp"

namespace helmnet {

enum class AugmentKind { kCrop, kRotate, kBrightness };

struct AugmentOp {
  AugmentKind kind;
  double parameter;  // crop fraction / degrees / brightness factor

  std::string describe() const;  // e.g. "crop-0.35", "rotate--30"
};

struct AugmentPlan {
  std::vector<AugmentOp> ops;   // applied to each source image independently
  bool include_original = true;
  std::uint64_t seed = 0;
};

// Removes `fraction` of each linear dimension: window of
// ceil((1-fraction)*W) x ceil((1-fraction)*H) at an rng-chosen offset,
// bilinearly resized back to the source size.
Image crop(const Image& image, double fraction, Rng& rng);

// Rotation about the image center, positive degrees counterclockwise,
// nearest-neighbor inverse mapping, out-of-bounds black.
Image rotate(const Image& image, double degrees);

// v -> clamp(round(v * factor), 0, 255) per channel.
Image brightness(const Image& image, double factor);

Image apply_op(const Image& image, const AugmentOp& op, Rng& rng);

struct SourceImage {
  Image image;
  int label = 0;
  std::string stem;  // filename without extension
};

struct AugmentedImage {
  Image image;
  int label = 0;
  std::string filename;     // "<stem>__<op>-<param>.ppm" or "<stem>.ppm"
  std::size_t source_index = 0;
  std::string op_desc;      // "original" for pass-through copies
};

// Deterministic in (sources, plan): per-image rng streams derive from
// (plan.seed, source index); output order is (source index, op index).
std::vector<AugmentedImage> expand_dataset(const std::vector<SourceImage>& sources,
                                           const AugmentPlan& plan);

// Line-oriented plan text: "crop 0.35", "rotate -30", "brightness 1.28",
// optional "include_original 0|1", '#' comments.
AugmentPlan parse_plan(const std::string& text);

// The six transforms the augmentation recipe names: crop 0.35, rotate +-30,
// rotate +-20 (one sign picked per image), brightness 1+-0.35 and 1+-0.28.
AugmentPlan default_plan(std::uint64_t seed);

}  // namespace helmnet
