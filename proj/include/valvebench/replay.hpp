#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "valvebench/errors.hpp"
#include "valvebench/rng.hpp"

namespace valvebench::rl {

/// One experience tuple. The action is stored in the normalized (-1, 1)
/// space the actor emits; the critic consumes the same space.
struct Transition {
    std::array<double, 3> obs{};
    double action = 0.0;
    double reward = 0.0;
    std::array<double, 3> next_obs{};
    bool done = false;
};

/// Fixed-capacity ring of transitions; oldest evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity_ < 1) throw ConfigError("replay: capacity must be >= 1");
        data_.reserve(capacity_ < 4096 ? capacity_ : 4096);
    }

    void push(const Transition& t) {
        if (data_.size() < capacity_) {
            data_.push_back(t);
        } else {
            data_[head_] = t;
            head_ = (head_ + 1) % capacity_;
        }
        ++pushed_;
    }

    /// Uniform sample with replacement; requires n <= size().
    std::vector<Transition> sample(std::size_t n, SeededRng& rng) const {
        if (data_.empty()) throw ConfigError("replay: sample from empty buffer");
        if (n > data_.size()) throw ConfigError("replay: sample size exceeds buffer size");
        std::vector<Transition> batch;
        batch.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            batch.push_back(data_[rng.index(data_.size())]);
        return batch;
    }

    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t total_pushed() const { return pushed_; }

    void clear() {
        data_.clear();
        head_ = 0;
        pushed_ = 0;
    }

    /// True if a transition with this exact action value is still stored (test hook).
    bool contains_action(double action) const {
        for (const Transition& t : data_)
            if (t.action == action) return true;
        return false;
    }

private:
    std::size_t capacity_;
    std::vector<Transition> data_;
    std::size_t head_ = 0;
    std::size_t pushed_ = 0;
};

} // namespace valvebench::rl
