#include <benchmark/benchmark.h>

#include "helmnet/augment.hpp"
#include "helmnet/layers.hpp"
#include "helmnet/rng.hpp"
#include "helmnet/tensor.hpp"

using namespace helmnet;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
  Tensor t(std::move(shape));
  Rng rng(seed);
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
  return t;
}

void BM_ConvForward(benchmark::State& state) {
  std::size_t side = static_cast<std::size_t>(state.range(0));
  Tensor input = random_tensor({3, side, side}, 1);
  Tensor weights = random_tensor({11, 3, 3, 3}, 2);
  Tensor bias = random_tensor({11}, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(conv2d_forward(input, weights, &bias));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ConvForward)->Arg(32)->Arg(64)->Arg(128);

void BM_ConvBackward(benchmark::State& state) {
  std::size_t side = static_cast<std::size_t>(state.range(0));
  Tensor input = random_tensor({3, side, side}, 1);
  Tensor weights = random_tensor({11, 3, 3, 3}, 2);
  Tensor grad_out = random_tensor({11, side - 2, side - 2}, 4);
  for (auto _ : state) {
    Tensor wgrad({11, 3, 3, 3});
    Tensor bgrad({11});
    benchmark::DoNotOptimize(
        conv2d_backward(input, weights, grad_out, wgrad, &bgrad));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ConvBackward)->Arg(32)->Arg(64);

void BM_MaxPool(benchmark::State& state) {
  std::size_t side = static_cast<std::size_t>(state.range(0));
  Tensor input = random_tensor({11, side, side}, 5);
  for (auto _ : state)
    benchmark::DoNotOptimize(maxpool2x2_forward(input));
}
BENCHMARK(BM_MaxPool)->Arg(64)->Arg(222);

void BM_Matmul(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  Tensor a = random_tensor({n, n}, 6);
  Tensor b = random_tensor({n, n}, 7);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(128)->Arg(256);

void BM_Linear(benchmark::State& state) {
  Linear layer(29744, 200);
  Tensor x = random_tensor({8, 29744}, 8);
  for (auto _ : state)
    benchmark::DoNotOptimize(layer.forward(x, Mode::kEval));
}
BENCHMARK(BM_Linear);

void BM_AugmentRotate(benchmark::State& state) {
  Image img;
  img.width = 224;
  img.height = 224;
  img.pixels.resize(3 * 224 * 224);
  Rng rng(9);
  for (auto& v : img.pixels) v = static_cast<std::uint8_t>(rng.below(256));
  for (auto _ : state) benchmark::DoNotOptimize(rotate(img, 30.0));
}
BENCHMARK(BM_AugmentRotate);

}  // namespace

BENCHMARK_MAIN();
