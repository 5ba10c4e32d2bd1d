#ifndef POLT_BUFFERS_HPP_
#define POLT_BUFFERS_HPP_

#include "polt/core.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace polt {

enum class BufferStrategy { Infinite, Fifo, Reservoir };

/// The learner's view of past examples. Stores copies.
///
/// Fifo keeps the most recent min(insertions, capacity) examples in arrival
/// order. Reservoir keeps a uniform sample of everything inserted so far
/// (deterministic given the seed); it exists for comparison runs only and
/// its contents are not in arrival order once replacement starts.
class HistoryBuffer {
 public:
  static HistoryBuffer infinite();
  static HistoryBuffer fifo(std::size_t capacity);
  static HistoryBuffer reservoir(std::size_t capacity, std::uint64_t seed);

  void insert(Example z);

  /// Contents in arrival order (for Fifo and Infinite). The span is
  /// invalidated by the next insert.
  std::span<const Example> contents() const { return items_; }
  /// Round index (1-based insertion count) of each stored example.
  std::span<const std::size_t> rounds() const { return rounds_; }
  std::vector<Example> snapshot() const { return items_; }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::size_t insertions() const { return inserted_; }
  std::size_t evictions() const { return evicted_; }
  std::optional<std::size_t> capacity() const { return capacity_; }
  BufferStrategy strategy() const { return strategy_; }

 private:
  HistoryBuffer(BufferStrategy s, std::optional<std::size_t> capacity, std::uint64_t seed);

  BufferStrategy strategy_;
  std::optional<std::size_t> capacity_;
  std::vector<Example> items_;
  std::vector<std::size_t> rounds_;
  std::size_t inserted_ = 0;
  std::size_t evicted_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace polt

#endif  // POLT_BUFFERS_HPP_
