// Copyright 2026 The bellcheck Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellcheck/tables.hpp"

namespace bellcheck {

/// Largest number of deterministic strategies we are willing to enumerate.
inline constexpr std::uint64_t kDefaultStrategyCap = std::uint64_t{1} << 24U;

/**
 * Deterministic local strategy: a +1/-1 answer for every (party, setting).
 *
 * Strategies of a shape are numbered lexicographically. The answers are laid
 * out party by party, settings in order, with the first answer on the most
 * significant bit of the strategy index and bit value 1 meaning -1. Index 0 is
 * therefore the all +1 strategy and the last index the all -1 strategy.
 */
class InstructionSet {
  public:
    InstructionSet() = default;

    InstructionSet(Shape shape, std::uint64_t index) : shape_(shape), index_(index) {
        if (bit_count() >= 64 || index >= (std::uint64_t{1} << bit_count())) {
            throw std::out_of_range("strategy index " + std::to_string(index) +
                                    " out of range for shape " + to_string(shape));
        }
    }

    const Shape &shape() const { return shape_; }
    std::uint64_t index() const { return index_; }

    /// Answer of `party` (0-based) when asked setting `setting`.
    int outcome(std::size_t party, std::size_t setting) const {
        if (party >= kParties || setting >= shape_[party]) {
            throw std::out_of_range("no such party/setting in instruction set");
        }
        std::size_t position = setting;
        for (std::size_t p = 0; p < party; ++p) {
            position += shape_[p];
        }
        const std::size_t shift = bit_count() - 1 - position;
        return ((index_ >> shift) & 1U) ? -1 : +1;
    }

    /// Product of the three answers for a joint-setting tuple.
    int product(const SettingTuple &t) const {
        return outcome(0, t[0]) * outcome(1, t[1]) * outcome(2, t[2]);
    }

    std::vector<std::vector<int>> table() const {
        std::vector<std::vector<int>> out(kParties);
        for (std::size_t p = 0; p < kParties; ++p) {
            for (std::size_t s = 0; s < shape_[p]; ++s) {
                out[p].push_back(outcome(p, s));
            }
        }
        return out;
    }

    friend bool operator==(const InstructionSet &, const InstructionSet &) = default;

  private:
    std::size_t bit_count() const { return shape_[0] + shape_[1] + shape_[2]; }

    Shape shape_{1, 1, 1};
    std::uint64_t index_ = 0;
};

/// 2^(k1+k2+k3), or throws if that exceeds `cap`.
inline std::uint64_t strategy_count(const Shape &shape, std::uint64_t cap = kDefaultStrategyCap) {
    const std::size_t bits = shape[0] + shape[1] + shape[2];
    if (bits >= 63 || (std::uint64_t{1} << bits) > cap) {
        throw std::length_error("shape " + to_string(shape) + " has 2^" + std::to_string(bits) +
                                " deterministic strategies, above the enumeration cap of " +
                                std::to_string(cap));
    }
    return std::uint64_t{1} << bits;
}

inline std::vector<InstructionSet> enumerate_instruction_sets(
    const Shape &shape, std::uint64_t cap = kDefaultStrategyCap) {
    const std::uint64_t count = strategy_count(shape, cap);
    std::vector<InstructionSet> out;
    out.reserve(count);
    for (std::uint64_t lambda = 0; lambda < count; ++lambda) {
        out.emplace_back(shape, lambda);
    }
    return out;
}

}  // namespace bellcheck
