#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>

namespace skelact {

// MPSC-safe bounded queue used between pipeline stages. Two overflow
// policies: block the producer (lossless replay) or evict the oldest item
// (live operation favors freshness). close() wakes consumers; pops drain the
// backlog and then return nullopt.
template <typename T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}

    void push_block(T item) {
        std::unique_lock<std::mutex> lock(mu_);
        cv_space_.wait(lock, [this] { return items_.size() < capacity_ || closed_; });
        if (closed_) return;
        items_.push_back(std::move(item));
        ++pushed_;
        hwm_ = std::max(hwm_, items_.size());
        cv_item_.notify_one();
    }

    // Returns the number of evicted items (0 or 1).
    std::size_t push_drop_oldest(T item) {
        std::unique_lock<std::mutex> lock(mu_);
        if (closed_) return 0;
        std::size_t evicted = 0;
        if (items_.size() >= capacity_) {
            items_.pop_front();
            ++evicted_;
            evicted = 1;
        }
        items_.push_back(std::move(item));
        ++pushed_;
        hwm_ = std::max(hwm_, items_.size());
        cv_item_.notify_one();
        return evicted;
    }

    std::optional<T> pop() {
        std::unique_lock<std::mutex> lock(mu_);
        cv_item_.wait(lock, [this] { return !items_.empty() || closed_; });
        if (items_.empty()) return std::nullopt;
        T item = std::move(items_.front());
        items_.pop_front();
        ++popped_;
        cv_space_.notify_one();
        return item;
    }

    void close() {
        std::lock_guard<std::mutex> lock(mu_);
        closed_ = true;
        cv_item_.notify_all();
        cv_space_.notify_all();
    }

    std::uint64_t pushed() const {
        std::lock_guard<std::mutex> lock(mu_);
        return pushed_;
    }
    std::uint64_t popped() const {
        std::lock_guard<std::mutex> lock(mu_);
        return popped_;
    }
    std::uint64_t evicted() const {
        std::lock_guard<std::mutex> lock(mu_);
        return evicted_;
    }
    std::size_t high_water_mark() const {
        std::lock_guard<std::mutex> lock(mu_);
        return hwm_;
    }

private:
    const std::size_t capacity_;
    mutable std::mutex mu_;
    std::condition_variable cv_item_;
    std::condition_variable cv_space_;
    std::deque<T> items_;
    bool closed_ = false;
    std::uint64_t pushed_ = 0;
    std::uint64_t popped_ = 0;
    std::uint64_t evicted_ = 0;
    std::size_t hwm_ = 0;
};

}  // namespace skelact
