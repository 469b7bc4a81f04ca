#pragma once

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "convlab/core.hpp"

namespace convlab {

struct Subsystem {
  std::string label;
  std::size_t dim;
  bool operator==(const Subsystem&) const = default;
};

// Ordered list of labeled subsystems.  Order is significant: it fixes the
// tensor-leg convention of every matrix and amplitude vector built on top.
class SystemLayout {
 public:
  SystemLayout() = default;

  explicit SystemLayout(std::vector<Subsystem> subsystems)
      : subsystems_(std::move(subsystems)) {
    std::set<std::string> seen;
    for (const auto& s : subsystems_) {
      if (s.dim < 1) throw LayoutError("subsystem '" + s.label + "' has dimension 0");
      if (!seen.insert(s.label).second)
        throw LayoutError("duplicate subsystem label '" + s.label + "'");
    }
    if (total_dim() < 1) throw LayoutError("empty layout");
  }

  const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  std::size_t size() const { return subsystems_.size(); }

  std::size_t total_dim() const {
    std::size_t d = 1;
    for (const auto& s : subsystems_) d *= s.dim;
    return d;
  }

  bool has_label(const std::string& label) const {
    return std::any_of(subsystems_.begin(), subsystems_.end(),
                       [&](const Subsystem& s) { return s.label == label; });
  }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t i = 0; i < subsystems_.size(); ++i)
      if (subsystems_[i].label == label) return i;
    throw LayoutError("unknown subsystem label '" + label + "'");
  }

  std::size_t dim_of(const std::string& label) const {
    return subsystems_[index_of(label)].dim;
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(subsystems_.size());
    for (const auto& s : subsystems_) out.push_back(s.label);
    return out;
  }

  // Row-major strides: index = sum_k digit_k * stride_k.
  std::vector<std::size_t> strides() const {
    std::vector<std::size_t> st(subsystems_.size());
    std::size_t acc = 1;
    for (std::size_t k = subsystems_.size(); k-- > 0;) {
      st[k] = acc;
      acc *= subsystems_[k].dim;
    }
    return st;
  }

  bool operator==(const SystemLayout&) const = default;

 private:
  std::vector<Subsystem> subsystems_;
};

inline SystemLayout concat(const SystemLayout& a, const SystemLayout& b) {
  std::vector<Subsystem> subs = a.subsystems();
  for (const auto& s : b.subsystems()) {
    if (a.has_label(s.label))
      throw LayoutError("label collision on '" + s.label + "'");
    subs.push_back(s);
  }
  return SystemLayout(std::move(subs));
}

}  // namespace convlab
