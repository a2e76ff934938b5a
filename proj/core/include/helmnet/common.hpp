#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace helmnet {

// Error taxonomy. Shape/contract violations are programming or config errors;
// data errors come from files on disk; numeric errors from divergence.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class ContractError : public std::runtime_error {
 public:
  explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Mode { kTrain, kEval };

// Global worker-thread count for parallel_for. Defaults to 1; the CLI's
// --threads flag sets it. Changing it must never change numerical results,
// so parallel_for is only ever used over disjoint output partitions.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for i in [0, n). With thread_count() == 1 (or small n) this is
// an inline loop. Each index owns its outputs; no reductions happen here.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace helmnet
