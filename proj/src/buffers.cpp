#include "polt/buffers.hpp"

#include <stdexcept>

namespace polt {

HistoryBuffer::HistoryBuffer(BufferStrategy s, std::optional<std::size_t> capacity, std::uint64_t seed)
    : strategy_(s), capacity_(capacity), rng_(seed) {
  if (capacity_ && *capacity_ == 0) throw std::invalid_argument("HistoryBuffer: capacity must be positive");
}

HistoryBuffer HistoryBuffer::infinite() { return HistoryBuffer(BufferStrategy::Infinite, std::nullopt, 0); }

HistoryBuffer HistoryBuffer::fifo(std::size_t capacity) {
  return HistoryBuffer(BufferStrategy::Fifo, capacity, 0);
}

HistoryBuffer HistoryBuffer::reservoir(std::size_t capacity, std::uint64_t seed) {
  return HistoryBuffer(BufferStrategy::Reservoir, capacity, seed);
}

void HistoryBuffer::insert(Example z) {
  ++inserted_;
  if (!capacity_ || items_.size() < *capacity_) {
    items_.push_back(std::move(z));
    rounds_.push_back(inserted_);
    return;
  }
  if (strategy_ == BufferStrategy::Fifo) {
    items_.erase(items_.begin());
    rounds_.erase(rounds_.begin());
    items_.push_back(std::move(z));
    rounds_.push_back(inserted_);
    ++evicted_;
    return;
  }
  // Reservoir: keep the newcomer with probability capacity / inserted.
  std::uniform_int_distribution<std::size_t> pick(0, inserted_ - 1);
  const std::size_t slot = pick(rng_);
  if (slot < *capacity_) {
    items_[slot] = std::move(z);
    rounds_[slot] = inserted_;
    ++evicted_;
  }
}

}  // namespace polt
