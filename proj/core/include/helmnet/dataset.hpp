#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "helmnet/image.hpp"
#include "helmnet/tensor.hpp"

namespace helmnet {

constexpr int kLabelNoHelmet = 0;
constexpr int kLabelHelmet = 1;

const char* label_name(int label);  // "no_helmet" / "helmet"

struct Sample {
  Image image;
  int label = 0;  // 0 = no_helmet, 1 = helmet
  std::string source_path;
};

struct SplitRatios {
  double train = 0.70, validation = 0.20, test = 0.10;
  void validate() const;  // sum must be 1 +- 1e-9, each > 0
};

struct DatasetSplit {
  std::vector<Sample> train, validation, test;
  std::uint64_t seed = 0;
  SplitRatios ratios;
};

// Per-class file listing under root/helmet and root/no_helmet, byte-wise
// path-sorted. Throws DataError when a class directory is missing or empty.
std::vector<std::pair<std::string, int>> list_class_files(const std::string& root);

struct CorpusLoadReport {
  std::vector<Sample> samples;
  std::vector<std::string> errors;  // per-file decode failures, run continues
};

// Decodes every readable image, resized to image_size x image_size.
CorpusLoadReport load_corpus(const std::string& root, int image_size);

// Global subset sizes are floor(ratio*N) for train and validation with the
// remainder in test; classes are apportioned so each subset's class mix stays
// within one sample of the global ratio. Shuffles per class with `seed`.
DatasetSplit stratified_split(const std::vector<Sample>& samples,
                              const SplitRatios& ratios, std::uint64_t seed);

// Exact subset sizes the splitter will produce for a given class composition
// (index 0 = train, 1 = validation, 2 = test). Exposed for tests.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios);

struct Batch {
  Tensor inputs;            // [N, 3, S, S], pixels scaled to [0,1]
  std::vector<int> labels;  // N entries
};

// Deterministic epoch-specific shuffle (derived from seed and epoch); the
// last partial batch is kept. Pass shuffle=false for evaluation order.
std::vector<Batch> batches(const std::vector<Sample>& subset,
                           std::size_t batch_size, std::uint64_t seed,
                           std::uint64_t epoch, bool shuffle);

// Two-class synthetic corpus: a noisy standing figure, with a bright ellipse
// above it for the helmet class. Written as a PPM tree load_corpus can read.
void generate_synthetic_corpus(std::size_t n_per_class, int image_size,
                               std::uint64_t seed, const std::string& out_dir);

// Split manifest CSV (path,label,subset,seed), one row per sample.
void write_split_manifest(const std::string& path, const DatasetSplit& split);

}  // namespace helmnet
