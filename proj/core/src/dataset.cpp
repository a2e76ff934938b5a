#include "helmnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helmnet/common.hpp"
#include "helmnet/rng.hpp"

namespace fs = std::filesystem;

namespace helmnet {

const char* label_name(int label) {
  return label == kLabelHelmet ? "helmet" : "no_helmet";
}

void SplitRatios::validate() const {
  if (!(train > 0.0 && validation > 0.0 && test > 0.0))
    throw ContractError("split ratios must all be positive");
  if (std::abs(train + validation + test - 1.0) > 1e-9)
    throw ContractError("split ratios must sum to 1");
}

std::vector<std::pair<std::string, int>> list_class_files(
    const std::string& root) {
  std::vector<std::pair<std::string, int>> out;
  for (int label : {kLabelHelmet, kLabelNoHelmet}) {
    fs::path dir = fs::path(root) / label_name(label);
    if (!fs::is_directory(dir))
      throw DataError("missing class directory: " + dir.string());
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file()) files.push_back(e.path().string());
    if (files.empty())
      throw DataError("class directory has no images: " + dir.string());
    std::sort(files.begin(), files.end());  // byte-wise, platform stable
    for (auto& f : files) out.emplace_back(std::move(f), label);
  }
  // byte-wise over full paths keeps the combined order deterministic too
  std::sort(out.begin(), out.end());
  return out;
}

CorpusLoadReport load_corpus(const std::string& root, int image_size) {
  auto files = list_class_files(root);
  CorpusLoadReport report;
  report.samples.resize(files.size());
  std::vector<std::string> errs(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    try {
      Image img = read_ppm_file(files[i].first);
      report.samples[i] = {resize_bilinear(img, image_size, image_size),
                           files[i].second, files[i].first};
    } catch (const DataError& e) {
      errs[i] = e.what();
    }
  });
  CorpusLoadReport out;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!errs[i].empty())
      out.errors.push_back(errs[i]);
    else
      out.samples.push_back(std::move(report.samples[i]));
  }
  if (out.samples.empty()) throw DataError("no decodable images under " + root);
  return out;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& r) {
  auto t = static_cast<std::size_t>(std::floor(r.train * n));
  auto v = static_cast<std::size_t>(std::floor(r.validation * n));
  return {t, v, n - t - v};
}

DatasetSplit stratified_split(const std::vector<Sample>& samples,
                              const SplitRatios& ratios, std::uint64_t seed) {
  ratios.validate();
  std::size_t n = samples.size();
  auto targets = split_sizes(n, ratios);
  for (std::size_t s : targets)
    if (s == 0)
      throw DataError("dataset of " + std::to_string(n) +
                      " samples leaves an empty subset at these ratios");

  // indices per class, shuffled with a per-class stream
  std::array<std::vector<std::size_t>, 2> per_class;
  for (std::size_t i = 0; i < n; ++i) {
    int l = samples[i].label;
    if (l != 0 && l != 1) throw ContractError("label out of range");
    per_class[l].push_back(i);
  }
  for (int c = 0; c < 2; ++c) {
    Rng rng(hash3(seed, 0x53504c49ULL, static_cast<std::uint64_t>(c)));
    auto& v = per_class[c];
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[rng.below(i)]);
  }

  // Apportion class 0 against the realized subset sizes by largest
  // remainder, then give class 1 the complement. Every cell ends within
  // one sample of its exact proportional share size_s * n_c / n, and both
  // the subset totals and the per-class totals are met exactly.
  std::size_t quota[2][3];
  std::size_t n0 = per_class[0].size();
  double frac[3];
  std::size_t assigned = 0;
  for (int s = 0; s < 3; ++s) {
    double want = double(targets[s]) * double(n0) / double(n);
    quota[0][s] = static_cast<std::size_t>(std::floor(want));
    frac[s] = want - std::floor(want);
    assigned += quota[0][s];
  }
  std::array<int, 3> order_up{0, 1, 2};
  std::stable_sort(order_up.begin(), order_up.end(),
                   [&](int a, int b) { return frac[a] > frac[b]; });
  for (std::size_t k = 0; assigned < n0; ++k, ++assigned)
    ++quota[0][order_up[k]];
  for (int s = 0; s < 3; ++s) quota[1][s] = targets[s] - quota[0][s];

  DatasetSplit split;
  split.seed = seed;
  split.ratios = ratios;
  for (int c = 0; c < 2; ++c) {
    std::size_t pos = 0;
    for (int s = 0; s < 3; ++s) {
      auto* dst = s == 0 ? &split.train : s == 1 ? &split.validation : &split.test;
      for (std::size_t k = 0; k < quota[c][s]; ++k)
        dst->push_back(samples[per_class[c][pos++]]);
    }
  }
  return split;
}

std::vector<Batch> batches(const std::vector<Sample>& subset,
                           std::size_t batch_size, std::uint64_t seed,
                           std::uint64_t epoch, bool shuffle) {
  if (batch_size < 1) throw ContractError("batch_size must be >= 1");
  std::size_t n = subset.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  if (shuffle) {
    Rng rng(hash2(seed, epoch));
    for (std::size_t i = n; i > 1; --i)
      std::swap(order[i - 1], order[rng.below(i)]);
  }
  std::vector<Batch> out;
  for (std::size_t start = 0; start < n; start += batch_size) {
    std::size_t bn = std::min(batch_size, n - start);
    const Image& first = subset[order[start]].image;
    std::size_t S = static_cast<std::size_t>(first.width);
    Batch b;
    b.inputs = Tensor({bn, 3, S, S});
    b.labels.resize(bn);
    for (std::size_t k = 0; k < bn; ++k) {
      const Sample& sm = subset[order[start + k]];
      const Image& img = sm.image;
      if (img.width != first.width || img.height != first.height)
        throw ShapeError("mixed image sizes in one subset");
      b.labels[k] = sm.label;
      float* dst = b.inputs.data() + k * 3 * S * S;
      for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t y = 0; y < S; ++y)
          for (std::size_t x = 0; x < S; ++x)
            dst[c * S * S + y * S + x] =
                img.pixels[(y * S + x) * 3 + c] / 255.0f;
    }
    out.push_back(std::move(b));
  }
  return out;
}

void generate_synthetic_corpus(std::size_t n_per_class, int image_size,
                               std::uint64_t seed, const std::string& out_dir) {
  if (n_per_class < 1) throw ContractError("n_per_class must be >= 1");
  if (image_size < 8) throw ContractError("image_size must be >= 8");
  for (int label : {kLabelNoHelmet, kLabelHelmet}) {
    fs::path dir = fs::path(out_dir) / label_name(label);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
      throw DataError("cannot create directory " + dir.string());
    for (std::size_t i = 0; i < n_per_class; ++i) {
      Rng rng(hash3(seed, static_cast<std::uint64_t>(label), i));
      int S = image_size;
      Image img;
      img.width = img.height = S;
      img.pixels.resize(static_cast<std::size_t>(S) * S * 3);
      // noisy background
      for (auto& v : img.pixels)
        v = static_cast<std::uint8_t>(40 + rng.below(120));
      // standing figure: dark torso, skin-toned head
      double cx = S * rng.uniform(0.35, 0.65);
      double head_y = S * rng.uniform(0.25, 0.40);
      double head_r = S * rng.uniform(0.08, 0.12);
      int torso_w = std::max(2, static_cast<int>(head_r * 1.6));
      int torso_top = static_cast<int>(head_y + head_r);
      for (int y = torso_top; y < S; ++y)
        for (int x = std::max(0, int(cx) - torso_w);
             x <= std::min(S - 1, int(cx) + torso_w); ++x) {
          img.at(x, y, 0) = static_cast<std::uint8_t>(30 + rng.below(20));
          img.at(x, y, 1) = static_cast<std::uint8_t>(30 + rng.below(20));
          img.at(x, y, 2) = static_cast<std::uint8_t>(60 + rng.below(30));
        }
      for (int y = 0; y < S; ++y)
        for (int x = 0; x < S; ++x) {
          double dx = x - cx, dy = y - head_y;
          if (dx * dx + dy * dy <= head_r * head_r) {
            img.at(x, y, 0) = 190;
            img.at(x, y, 1) = 150;
            img.at(x, y, 2) = 120;
          }
        }
      if (label == kLabelHelmet) {
        // bright yellow ellipse capping the head
        double hr = head_r * 1.25;
        for (int y = 0; y < S; ++y)
          for (int x = 0; x < S; ++x) {
            double dx = (x - cx) / hr;
            double dy = (y - (head_y - head_r * 0.45)) / (hr * 0.65);
            if (dx * dx + dy * dy <= 1.0 && y <= head_y) {
              img.at(x, y, 0) = 250;
              img.at(x, y, 1) = 220;
              img.at(x, y, 2) = 30;
            }
          }
      }
      char name[32];
      std::snprintf(name, sizeof name, "img_%05zu.ppm", i);
      write_ppm_file((dir / name).string(), img);
    }
  }
}

void write_split_manifest(const std::string& path, const DatasetSplit& split) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot write " + path);
  f << "path,label,subset,seed\n";
  auto emit = [&](const std::vector<Sample>& v, const char* name) {
    for (const auto& s : v)
      f << s.source_path << "," << s.label << "," << name << "," << split.seed
        << "\n";
  };
  emit(split.train, "train");
  emit(split.validation, "val");
  emit(split.test, "test");
  if (!f) throw DataError("write failed: " + path);
}

}  // namespace helmnet
