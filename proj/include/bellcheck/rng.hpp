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

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace bellcheck {

/// All sampling uses 64-bit Mersenne Twister streams.
using Rng = std::mt19937_64;

/// Stream for one joint-setting tuple: root seed XOR flattened tuple index.
inline Rng tuple_stream(std::uint64_t root_seed, std::uint64_t tuple_index) {
    return Rng(root_seed ^ tuple_index);
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11U) * 0x1.0p-53;
}

/// Inverse-CDF sampler over a finite discrete distribution.
class DiscreteSampler {
  public:
    explicit DiscreteSampler(std::span<const double> probabilities) {
        double total = 0.0;
        cumulative_.reserve(probabilities.size());
        for (double p : probabilities) {
            total += std::max(p, 0.0);
            cumulative_.push_back(total);
        }
        if (!(total > 0.0)) {
            throw std::invalid_argument("distribution has no positive mass");
        }
        for (double &c : cumulative_) {
            c /= total;
        }
    }

    std::size_t operator()(Rng &rng) const {
        const double u = uniform01(rng);
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) {
            // u landed in the rounding gap above the last cumulative value.
            return last_positive();
        }
        return static_cast<std::size_t>(it - cumulative_.begin());
    }

  private:
    std::size_t last_positive() const {
        std::size_t n = cumulative_.size() - 1;
        while (n > 0 && cumulative_[n] == cumulative_[n - 1]) {
            --n;
        }
        return n;
    }

    std::vector<double> cumulative_;
};

}  // namespace bellcheck
