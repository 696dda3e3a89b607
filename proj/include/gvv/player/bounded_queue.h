#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>

namespace gvv {

// Blocking FIFO with a fixed capacity. flush() empties it and makes every
// push that was waiting for space give up, which is how a seek cancels
// work already handed to the next stage.
template <typename T>
class BoundedQueue {
 public:
  using Clock = std::chrono::steady_clock;

  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity ? capacity : 1) {}

  // Blocks while full. Returns false if the queue was flushed or closed
  // before the item could be stored.
  bool push(T item) {
    std::unique_lock lk(mu_);
    const std::uint64_t epoch = epoch_;
    not_full_.wait(lk, [&] { return closed_ || epoch_ != epoch || items_.size() < capacity_; });
    if (closed_ || epoch_ != epoch) return false;
    items_.push_back(std::move(item));
    if (items_.size() > peak_) peak_ = items_.size();
    not_empty_.notify_one();
    return true;
  }

  // Blocks until an item arrives; nullopt once closed and drained.
  std::optional<T> pop() {
    std::unique_lock lk(mu_);
    not_empty_.wait(lk, [&] { return closed_ || !items_.empty(); });
    return take(lk);
  }

  // nullopt if nothing arrives before the deadline.
  std::optional<T> pop_until(Clock::time_point deadline) {
    std::unique_lock lk(mu_);
    not_empty_.wait_until(lk, deadline, [&] { return closed_ || !items_.empty(); });
    return take(lk);
  }

  void flush() {
    std::lock_guard lk(mu_);
    items_.clear();
    ++epoch_;
    not_full_.notify_all();
  }

  void close() {
    std::lock_guard lk(mu_);
    closed_ = true;
    not_full_.notify_all();
    not_empty_.notify_all();
  }

  std::size_t size() const {
    std::lock_guard lk(mu_);
    return items_.size();
  }
  std::size_t capacity() const { return capacity_; }
  // Largest occupancy ever observed.
  std::size_t peak() const {
    std::lock_guard lk(mu_);
    return peak_;
  }

 private:
  std::optional<T> take(std::unique_lock<std::mutex>&) {
    if (items_.empty()) return std::nullopt;
    T item = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return item;
  }

  const std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable not_full_, not_empty_;
  std::deque<T> items_;
  std::uint64_t epoch_ = 0;
  std::size_t peak_ = 0;
  bool closed_ = false;
};

}  // namespace gvv
