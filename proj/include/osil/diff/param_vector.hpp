#pragma once

#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "osil/core/errors.hpp"

namespace osil {

// Flat storage for learnable parameters plus named shape descriptors.
// Optimizers and checkpointing see one contiguous array; models address
// slices through the layout.
struct ParamEntry {
    std::string name;
    std::vector<int> shape;
    std::size_t offset = 0;
    std::size_t size = 0;
};

class ParamVector {
  public:
    std::size_t add(std::string name, std::vector<int> shape) {
        std::size_t n = 1;
        for (int d : shape) {
            if (d <= 0) throw DataError("ParamVector: nonpositive shape dim in " + name);
            n *= static_cast<std::size_t>(d);
        }
        ParamEntry e{std::move(name), std::move(shape), values_.size(), n};
        layout_.push_back(e);
        values_.resize(values_.size() + n, 0.0);
        return layout_.size() - 1;
    }

    std::size_t size() const { return values_.size(); }
    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    const std::vector<ParamEntry>& layout() const { return layout_; }

    std::span<double> slice(std::size_t entry) {
        const ParamEntry& e = layout_.at(entry);
        return {values_.data() + e.offset, e.size};
    }
    std::span<const double> slice(std::size_t entry) const {
        const ParamEntry& e = layout_.at(entry);
        return {values_.data() + e.offset, e.size};
    }

    bool same_layout(const ParamVector& other) const {
        if (layout_.size() != other.layout_.size()) return false;
        for (std::size_t i = 0; i < layout_.size(); ++i) {
            if (layout_[i].name != other.layout_[i].name) return false;
            if (layout_[i].shape != other.layout_[i].shape) return false;
        }
        return true;
    }

  private:
    std::vector<double> values_;
    std::vector<ParamEntry> layout_;
};

}  // namespace osil
