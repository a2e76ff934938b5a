#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "helmnet/dataset.hpp"
#include "helmnet/rng.hpp"

using namespace helmnet;
namespace fs = std::filesystem;

namespace {

std::vector<Sample> fake_corpus(std::size_t n_helmet, std::size_t n_none) {
  std::vector<Sample> samples;
  Image img;
  img.width = 2;
  img.height = 2;
  img.pixels.assign(12, 100);
  for (std::size_t i = 0; i < n_helmet; ++i)
    samples.push_back({img, kLabelHelmet, "h" + std::to_string(i)});
  for (std::size_t i = 0; i < n_none; ++i)
    samples.push_back({img, kLabelNoHelmet, "n" + std::to_string(i)});
  return samples;
}

}  // namespace

TEST_CASE("split sizes: floor/floor/remainder gives the published counts") {
  SplitRatios r;  // 0.70 / 0.20 / 0.10
  auto s500 = split_sizes(500, r);
  CHECK(s500[0] == 350);
  CHECK(s500[1] == 100);
  CHECK(s500[2] == 50);
  auto s2886 = split_sizes(2886, r);
  CHECK(s2886[0] == 2020);
  CHECK(s2886[1] == 577);
  CHECK(s2886[2] == 289);
}

TEST_CASE("stratified split hits the global sizes with a balanced class mix") {
  auto samples = fake_corpus(250, 250);
  DatasetSplit split = stratified_split(samples, SplitRatios{}, 7);
  CHECK(split.train.size() == 350);
  CHECK(split.validation.size() == 100);
  CHECK(split.test.size() == 50);
  auto count_helmet = [](const std::vector<Sample>& v) {
    std::size_t n = 0;
    for (const auto& s : v) n += s.label == kLabelHelmet;
    return n;
  };
  CHECK(count_helmet(split.train) == 175);
  CHECK(count_helmet(split.validation) == 50);
  CHECK(count_helmet(split.test) == 25);
}

TEST_CASE("property: splits are disjoint, exhaustive, stratified (random cases)") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t nh = 5 + rng.below(120), nn = 5 + rng.below(120);
    std::uint64_t seed = rng.next_u64();
    auto samples = fake_corpus(nh, nn);
    DatasetSplit split = stratified_split(samples, SplitRatios{}, seed);

    std::size_t n = nh + nn;
    auto sizes = split_sizes(n, SplitRatios{});
    CHECK(split.train.size() == sizes[0]);
    CHECK(split.validation.size() == sizes[1]);
    CHECK(split.test.size() == sizes[2]);

    std::set<std::string> seen;
    for (const auto* subset : {&split.train, &split.validation, &split.test})
      for (const auto& s : *subset) seen.insert(s.source_path);
    CHECK(seen.size() == n);  // disjoint and exhaustive

    // per-subset class mix within one sample of the global ratio
    double global = double(nh) / n;
    for (const auto* subset : {&split.train, &split.validation, &split.test}) {
      if (subset->empty()) continue;
      std::size_t h = 0;
      for (const auto& s : *subset) h += s.label == kLabelHelmet;
      double expect = global * subset->size();
      CHECK(std::abs(double(h) - expect) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("split is deterministic in seed and sensitive to it") {
  auto samples = fake_corpus(40, 40);
  DatasetSplit a = stratified_split(samples, SplitRatios{}, 5);
  DatasetSplit b = stratified_split(samples, SplitRatios{}, 5);
  DatasetSplit c = stratified_split(samples, SplitRatios{}, 6);
  auto paths = [](const std::vector<Sample>& v) {
    std::vector<std::string> p;
    for (const auto& s : v) p.push_back(s.source_path);
    return p;
  };
  CHECK(paths(a.train) == paths(b.train));
  CHECK(paths(a.train) != paths(c.train));
}

TEST_CASE("ratio validation") {
  SplitRatios ok{0.5, 0.3, 0.2};
  ok.validate();
  CHECK_THROWS_AS((SplitRatios{0.5, 0.5, 0.2}.validate()), ContractError);
  CHECK_THROWS_AS((SplitRatios{1.0, 0.0, 0.0}.validate()), ContractError);
}

TEST_CASE("batching: 350 samples at batch 32 give 11 batches, last of 30") {
  auto samples = fake_corpus(175, 175);
  auto bs = batches(samples, 32, 1, 0, true);
  REQUIRE(bs.size() == 11);
  for (int i = 0; i < 10; ++i) CHECK(bs[i].labels.size() == 32);
  CHECK(bs[10].labels.size() == 30);
  CHECK(bs[0].inputs.shape() == std::vector<std::size_t>{32, 3, 2, 2});

  // pixel scaling: 100/255
  CHECK(bs[0].inputs[0] == doctest::Approx(100.0 / 255.0));
}

TEST_CASE("batch shuffle is epoch-dependent but evaluation order is not") {
  auto samples = fake_corpus(20, 20);
  for (std::size_t i = 0; i < samples.size(); ++i)
    samples[i].image.pixels.assign(12, static_cast<std::uint8_t>(i));
  auto flat = [](const std::vector<Batch>& bs) {
    std::vector<float> v;
    for (const auto& b : bs)
      v.insert(v.end(), b.inputs.values().begin(), b.inputs.values().end());
    return v;
  };
  CHECK(flat(batches(samples, 8, 3, 0, true)) ==
        flat(batches(samples, 8, 3, 0, true)));
  CHECK(flat(batches(samples, 8, 3, 0, true)) !=
        flat(batches(samples, 8, 3, 1, true)));
  // unshuffled order is the subset order
  auto ev = batches(samples, 8, 123, 9, false);
  CHECK(ev[0].inputs[0] == doctest::Approx(0.0));
  CHECK(ev[0].inputs[12] * 255.0 == doctest::Approx(1.0));
}

TEST_CASE("synthetic corpus generates a loadable, labeled tree") {
  std::string dir = "test_synth_corpus";
  fs::remove_all(dir);
  generate_synthetic_corpus(6, 16, 42, dir);
  auto files = list_class_files(dir);
  CHECK(files.size() == 12);

  CorpusLoadReport report = load_corpus(dir, 12);
  CHECK(report.samples.size() == 12);
  CHECK(report.errors.empty());
  std::size_t helmets = 0;
  for (const auto& s : report.samples) {
    helmets += s.label == kLabelHelmet;
    CHECK(s.image.width == 12);
    CHECK(s.image.height == 12);
  }
  CHECK(helmets == 6);

  // determinism: same seed regenerates identical bytes
  std::string dir2 = "test_synth_corpus2";
  fs::remove_all(dir2);
  generate_synthetic_corpus(6, 16, 42, dir2);
  auto f1 = list_class_files(dir);
  auto f2 = list_class_files(dir2);
  for (std::size_t i = 0; i < f1.size(); ++i) {
    std::ifstream a(f1[i].first, std::ios::binary), b(f2[i].first, std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(a)), {});
    std::string sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
  }
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("corpus loading skips undecodable files but keeps going") {
  std::string dir = "test_bad_corpus";
  fs::remove_all(dir);
  generate_synthetic_corpus(3, 8, 1, dir);
  std::ofstream(dir + "/helmet/broken.ppm") << "not a ppm";
  CorpusLoadReport report = load_corpus(dir, 8);
  CHECK(report.samples.size() == 6);
  REQUIRE(report.errors.size() == 1);
  CHECK(report.errors[0].find("broken.ppm") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("missing class directory is a data error") {
  std::string dir = "test_missing_class";
  fs::remove_all(dir);
  fs::create_directories(dir + "/helmet");
  std::ofstream(dir + "/helmet/a.ppm") << "x";
  CHECK_THROWS_AS(list_class_files(dir), DataError);  // no no_helmet dir
  fs::remove_all(dir);
}

TEST_CASE("split manifest rows carry path,label,subset,seed") {
  auto samples = fake_corpus(5, 5);
  DatasetSplit split = stratified_split(samples, SplitRatios{}, 3);
  std::string path = "test_manifest.csv";
  write_split_manifest(path, split);
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  CHECK(header == "path,label,subset,seed");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(f, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 10);
  fs::remove(path);
}
