#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace pccseg {

// Sparse node -> hop-count map with an implicit default for absent nodes.
// Particles only ever touch nodes they visit, so the map stays far smaller
// than the graph.
class HopTable {
public:
    explicit HopTable(std::uint32_t default_value = 0) : default_(default_value) { rehash(16); }

    std::uint32_t default_value() const { return default_; }
    std::size_t stored() const { return size_; }

    std::uint32_t get(std::uint32_t node) const {
        for (std::size_t slot = hash(node);; slot = (slot + 1) & mask_) {
            if (keys_[slot] == node)
                return values_[slot];
            if (keys_[slot] == kEmpty)
                return default_;
        }
    }

    // Stores min(current, value).
    void lower(std::uint32_t node, std::uint32_t value) {
        if (value >= default_ && get(node) == default_)
            return;
        std::size_t slot = hash(node);
        for (;; slot = (slot + 1) & mask_) {
            if (keys_[slot] == node) {
                if (value < values_[slot])
                    values_[slot] = value;
                return;
            }
            if (keys_[slot] == kEmpty)
                break;
        }
        keys_[slot] = node;
        values_[slot] = value;
        if (++size_ * 10 > keys_.size() * 7)
            rehash(keys_.size() * 2);
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t i = 0; i < keys_.size(); ++i)
            if (keys_[i] != kEmpty)
                fn(keys_[i], values_[i]);
    }

private:
    static constexpr std::uint32_t kEmpty = 0xFFFFFFFFu;

    std::size_t hash(std::uint32_t node) const {
        return static_cast<std::size_t>((node * 0x9E3779B97F4A7C15ull) >> 32) & mask_;
    }

    void rehash(std::size_t capacity) {
        std::vector<std::uint32_t> old_keys = std::move(keys_);
        std::vector<std::uint32_t> old_values = std::move(values_);
        keys_.assign(capacity, kEmpty);
        values_.assign(capacity, 0);
        mask_ = capacity - 1;
        for (std::size_t i = 0; i < old_keys.size(); ++i) {
            if (old_keys[i] == kEmpty)
                continue;
            std::size_t slot = hash(old_keys[i]);
            while (keys_[slot] != kEmpty)
                slot = (slot + 1) & mask_;
            keys_[slot] = old_keys[i];
            values_[slot] = old_values[i];
        }
    }

    std::uint32_t default_;
    std::vector<std::uint32_t> keys_;
    std::vector<std::uint32_t> values_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
};

}  // namespace pccseg
