#pragma once

// Averaged perceptron weight store with lazy averaging.

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>

namespace udkit {

class AveragedWeights {
 public:
  double get(const std::string& key) const {
    auto it = w_.find(key);
    return it == w_.end() ? 0.0 : it->second.value;
  }

  void update(const std::string& key, double delta) {
    auto& e = w_[key];
    e.total += static_cast<double>(step_ - e.stamp) * e.value;
    e.stamp = step_;
    e.value += delta;
  }

  // Marks the end of one training instance.
  void tick() { ++step_; }

  // Weights averaged over every instance seen so far, zeros dropped.
  std::map<std::string, double> averaged() const {
    std::map<std::string, double> out;
    if (step_ == 0) return out;
    for (const auto& [k, e] : w_) {
      double total = e.total + static_cast<double>(step_ - e.stamp) * e.value;
      double avg = total / static_cast<double>(step_);
      if (avg != 0.0) out[k] = avg;
    }
    return out;
  }

 private:
  struct Entry {
    double value = 0;
    double total = 0;
    std::int64_t stamp = 0;
  };
  std::unordered_map<std::string, Entry> w_;
  std::int64_t step_ = 0;
};

}  // namespace udkit
