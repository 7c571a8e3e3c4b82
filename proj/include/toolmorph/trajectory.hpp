#pragma once

#include <string>
#include <utility>
#include <vector>

#include "toolmorph/dual.hpp"
#include "toolmorph/errors.hpp"

namespace toolmorph {

// Per-step simulator signals, one dual per declared channel per step.
// Channels are stored in declaration order so iteration (and CSV dumps) are
// deterministic. Initial-state constants (h0, box center, ...) live in
// `initial` and never carry tangents.
class Trajectory {
 public:
  explicit Trajectory(int horizon) : horizon_(horizon) {}

  int horizon() const { return horizon_; }

  void declare_channel(const std::string& name) {
    channels_.emplace_back(name, std::vector<Dual>());
    channels_.back().second.reserve(static_cast<std::size_t>(horizon_));
  }

  void record(const std::string& name, Dual v) {
    find(name).push_back(std::move(v));
  }

  const std::vector<Dual>& channel(const std::string& name) const {
    for (const auto& [n, values] : channels_)
      if (n == name) return values;
    throw MissingChannel("trajectory channel '" + name + "' not present");
  }

  bool has_channel(const std::string& name) const {
    for (const auto& [n, values] : channels_)
      if (n == name) return true;
    return false;
  }

  const std::vector<std::pair<std::string, std::vector<Dual>>>& channels() const {
    return channels_;
  }

  // Initial-state anchors (h0, box center, ...). They may carry tangents:
  // when the tau = 0 state depends on the design (a wound chain settles onto
  // the deformed tool), the anchor's sensitivity is part of the loss gradient.
  void set_initial(const std::string& name, Dual v) { initial_.emplace_back(name, std::move(v)); }

  const Dual& initial(const std::string& name) const {
    for (const auto& [n, v] : initial_)
      if (n == name) return v;
    throw MissingChannel("trajectory initial value '" + name + "' not present");
  }

  double initial_value(const std::string& name) const { return initial(name).value(); }

  // Every declared channel must hold exactly H records.
  void check_complete() const {
    for (const auto& [n, values] : channels_)
      if (static_cast<int>(values.size()) != horizon_)
        throw HorizonMismatch("channel '" + n + "' has " + std::to_string(values.size()) +
                              " records, expected " + std::to_string(horizon_));
  }

 private:
  std::vector<Dual>& find(const std::string& name) {
    for (auto& [n, values] : channels_)
      if (n == name) return values;
    throw MissingChannel("trajectory channel '" + name + "' not declared");
  }

  int horizon_;
  std::vector<std::pair<std::string, std::vector<Dual>>> channels_;
  std::vector<std::pair<std::string, Dual>> initial_;
};

}  // namespace toolmorph
