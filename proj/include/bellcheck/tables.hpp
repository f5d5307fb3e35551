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

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bellcheck {

inline constexpr std::size_t kParties = 3;
inline constexpr std::size_t kOutcomes = 8;

/// Slack allowed on estimated or imported correlation values.
inline constexpr double kCorrelationSlack = 1e-9;

/// One setting index per party.
using SettingTuple = std::array<std::size_t, kParties>;

/// Number of measurement settings available to each party.
///
/// Joint-setting tuples are flattened row-major: party 1 varies slowest.
struct Shape {
    std::array<std::size_t, kParties> settings{};

    Shape() = default;
    Shape(std::size_t k1, std::size_t k2, std::size_t k3) : settings{k1, k2, k3} {
        if (k1 == 0 || k2 == 0 || k3 == 0) {
            throw std::invalid_argument("every party needs at least one setting");
        }
    }

    std::size_t operator[](std::size_t party) const { return settings.at(party); }

    std::size_t tuple_count() const { return settings[0] * settings[1] * settings[2]; }

    std::size_t index(const SettingTuple &t) const {
        for (std::size_t p = 0; p < kParties; ++p) {
            if (t[p] >= settings[p]) {
                throw std::out_of_range("setting index out of range for party " +
                                        std::to_string(p + 1));
            }
        }
        return (t[0] * settings[1] + t[1]) * settings[2] + t[2];
    }

    SettingTuple tuple(std::size_t flat) const {
        SettingTuple t{};
        t[2] = flat % settings[2];
        flat /= settings[2];
        t[1] = flat % settings[1];
        t[0] = flat / settings[1];
        return t;
    }

    friend bool operator==(const Shape &, const Shape &) = default;
};

inline std::string to_string(const Shape &s) {
    return "[" + std::to_string(s[0]) + "," + std::to_string(s[1]) + "," + std::to_string(s[2]) + "]";
}

// Outcome triples are indexed 0..7 with party 1 in the most significant bit;
// a 0 bit is the +1 outcome. Index 0 is "+++", index 1 is "++-".

inline int outcome_sign(std::size_t outcome, std::size_t party) {
    return ((outcome >> (kParties - 1 - party)) & 1U) ? -1 : +1;
}

inline int outcome_product(std::size_t outcome) {
    return outcome_sign(outcome, 0) * outcome_sign(outcome, 1) * outcome_sign(outcome, 2);
}

inline std::size_t outcome_index(const std::array<int, kParties> &signs) {
    std::size_t index = 0;
    for (std::size_t p = 0; p < kParties; ++p) {
        if (signs[p] != 1 && signs[p] != -1) {
            throw std::invalid_argument("outcomes must be +1 or -1");
        }
        index = (index << 1U) | (signs[p] < 0 ? 1U : 0U);
    }
    return index;
}

inline std::string outcome_label(std::size_t outcome) {
    std::string label;
    for (std::size_t p = 0; p < kParties; ++p) {
        label.push_back(outcome_sign(outcome, p) > 0 ? '+' : '-');
    }
    return label;
}

/// Three-party correlation value E(i,j,k) for every joint-setting tuple.
class CorrelationTable {
  public:
    CorrelationTable() = default;

    /// Zero table.
    explicit CorrelationTable(Shape shape) : shape_(shape), values_(shape.tuple_count(), 0.0) {}

    CorrelationTable(Shape shape, std::vector<double> values)
        : shape_(shape), values_(std::move(values)) {
        if (values_.size() != shape_.tuple_count()) {
            throw std::invalid_argument("correlation table has " + std::to_string(values_.size()) +
                                        " entries, shape " + to_string(shape_) + " needs " +
                                        std::to_string(shape_.tuple_count()));
        }
        for (std::size_t n = 0; n < values_.size(); ++n) {
            check_entry(n, values_[n]);
        }
    }

    template <typename F>
    static CorrelationTable from_function(Shape shape, F &&f) {
        std::vector<double> values(shape.tuple_count());
        for (std::size_t n = 0; n < values.size(); ++n) {
            values[n] = f(shape.tuple(n));
        }
        return CorrelationTable(shape, std::move(values));
    }

    const Shape &shape() const { return shape_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<double> &values() const { return values_; }

    double operator[](std::size_t flat) const { return values_.at(flat); }
    double at(const SettingTuple &t) const { return values_[shape_.index(t)]; }

    CorrelationTable scaled(double factor) const {
        std::vector<double> out(values_);
        for (double &v : out) {
            v *= factor;
        }
        return CorrelationTable(shape_, std::move(out));
    }

  private:
    void check_entry(std::size_t flat, double value) const {
        if (!std::isfinite(value) || std::abs(value) > 1.0 + kCorrelationSlack) {
            const auto t = shape_.tuple(flat);
            throw std::invalid_argument("correlation E(" + std::to_string(t[0]) + "," +
                                        std::to_string(t[1]) + "," + std::to_string(t[2]) +
                                        ") = " + std::to_string(value) + " lies outside [-1, 1]");
        }
    }

    Shape shape_{};
    std::vector<double> values_{};
};

}  // namespace bellcheck
