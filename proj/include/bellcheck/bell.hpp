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

/**
 * @file
 * Three-party Bell expressions: linear functionals on correlation tables,
 * their local (instruction-set) and algebraic bounds, and quantum values.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bellcheck/instruction_set.hpp"
#include "bellcheck/quantum.hpp"
#include "bellcheck/tables.hpp"

namespace bellcheck {

/// Real coefficients c(i,j,k), flattened in the same order as CorrelationTable.
class BellExpression {
  public:
    BellExpression(Shape shape, std::vector<double> coefficients)
        : shape_(shape), coefficients_(std::move(coefficients)) {
        if (coefficients_.size() != shape_.tuple_count()) {
            throw std::invalid_argument("Bell expression has " +
                                        std::to_string(coefficients_.size()) +
                                        " coefficients, shape " + to_string(shape_) + " needs " +
                                        std::to_string(shape_.tuple_count()));
        }
        bool any_nonzero = false;
        for (double c : coefficients_) {
            if (!std::isfinite(c)) {
                throw std::invalid_argument("Bell expression coefficient is not finite");
            }
            any_nonzero = any_nonzero || c != 0.0;
        }
        if (!any_nonzero) {
            throw std::invalid_argument("Bell expression needs at least one nonzero coefficient");
        }
    }

    const Shape &shape() const { return shape_; }
    const std::vector<double> &coefficients() const { return coefficients_; }
    double operator[](std::size_t flat) const { return coefficients_.at(flat); }
    double at(const SettingTuple &t) const { return coefficients_[shape_.index(t)]; }

    BellExpression negated() const {
        std::vector<double> c(coefficients_);
        for (double &v : c) {
            v = -v;
        }
        return {shape_, std::move(c)};
    }

  private:
    Shape shape_;
    std::vector<double> coefficients_;
};

/// Per-party lists of measurement directions.
class SettingsAssignment {
  public:
    explicit SettingsAssignment(std::array<std::vector<MeasurementSetting>, kParties> parties)
        : parties_(std::move(parties)) {
        for (std::size_t p = 0; p < kParties; ++p) {
            if (parties_[p].empty()) {
                throw std::invalid_argument("party " + std::to_string(p + 1) +
                                            " has no measurement settings");
            }
        }
    }

    Shape shape() const { return {parties_[0].size(), parties_[1].size(), parties_[2].size()}; }

    const std::vector<MeasurementSetting> &party(std::size_t p) const { return parties_.at(p); }
    const MeasurementSetting &setting(std::size_t p, std::size_t s) const {
        return parties_.at(p).at(s);
    }
    void set(std::size_t p, std::size_t s, const MeasurementSetting &m) { parties_.at(p).at(s) = m; }

    void require_shape(const Shape &expected) const {
        if (shape() != expected) {
            throw std::invalid_argument("settings assignment shape " + to_string(shape()) +
                                        " does not match expression shape " + to_string(expected));
        }
    }

    friend bool operator==(const SettingsAssignment &, const SettingsAssignment &) = default;

  private:
    std::array<std::vector<MeasurementSetting>, kParties> parties_;
};

struct BellScenario {
    BellExpression expression;
    SettingsAssignment assignment;
};

/**
 * Mermin's three-party expression  +XXX - XYY - YXY - YYX.
 *
 * Setting 0 of every party is x = (1,0,0), setting 1 is y = (0,1,0). With this
 * sign convention the (|000> + |111>)/sqrt(2) state reaches +4.
 */
inline BellScenario mermin3() {
    const Shape shape(2, 2, 2);
    std::vector<double> c(shape.tuple_count(), 0.0);
    c[shape.index({0, 0, 0})] = 1.0;
    c[shape.index({0, 1, 1})] = -1.0;
    c[shape.index({1, 0, 1})] = -1.0;
    c[shape.index({1, 1, 0})] = -1.0;
    const MeasurementSetting x(1, 0, 0);
    const MeasurementSetting y(0, 1, 0);
    return {BellExpression(shape, std::move(c)),
            SettingsAssignment({std::vector{x, y}, std::vector{x, y}, std::vector{x, y}})};
}

inline double evaluate(const BellExpression &expr, const CorrelationTable &table) {
    if (expr.shape() != table.shape()) {
        throw std::invalid_argument("correlation table shape " + to_string(table.shape()) +
                                    " does not match expression shape " +
                                    to_string(expr.shape()));
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < table.size(); ++n) {
        sum += expr[n] * table[n];
    }
    return sum;
}

/// Sum of |c|: the maximum over every table with entries in [-1, 1].
inline double algebraic_bound(const BellExpression &expr) {
    double sum = 0.0;
    for (double c : expr.coefficients()) {
        sum += std::abs(c);
    }
    return sum;
}

/// Quantum correlation table of `state` under `assign`.
inline CorrelationTable quantum_correlations(const QuantumState &state,
                                             const SettingsAssignment &assign) {
    return CorrelationTable::from_function(assign.shape(), [&](const SettingTuple &t) {
        return correlation(state, assign.setting(0, t[0]), assign.setting(1, t[1]),
                           assign.setting(2, t[2]));
    });
}

inline double quantum_value(const BellExpression &expr, const QuantumState &state,
                            const SettingsAssignment &assign) {
    assign.require_shape(expr.shape());
    return evaluate(expr, quantum_correlations(state, assign));
}

/// Value of a deterministic strategy.
inline double strategy_value(const BellExpression &expr, const InstructionSet &strategy) {
    double sum = 0.0;
    for (std::size_t n = 0; n < expr.shape().tuple_count(); ++n) {
        sum += expr[n] * strategy.product(expr.shape().tuple(n));
    }
    return sum;
}

struct LhvBound {
    double value;
    InstructionSet witness;
};

/**
 * Exact maximum of the expression over all deterministic strategies.
 *
 * One-sided: negate the expression for the lower bound. Ties go to the first
 * maximizer in lexicographic strategy order.
 */
inline LhvBound lhv_bound(const BellExpression &expr, std::uint64_t cap = kDefaultStrategyCap) {
    const Shape &shape = expr.shape();
    const std::uint64_t count = strategy_count(shape, cap);
    const std::size_t bits = shape[0] + shape[1] + shape[2];
    std::array<std::vector<double>, kParties> signs;
    for (std::size_t p = 0; p < kParties; ++p) {
        signs[p].resize(shape[p]);
    }

    double best = -INFINITY;
    std::uint64_t best_index = 0;
    for (std::uint64_t lambda = 0; lambda < count; ++lambda) {
        std::size_t position = 0;
        for (std::size_t p = 0; p < kParties; ++p) {
            for (std::size_t s = 0; s < shape[p]; ++s, ++position) {
                signs[p][s] = ((lambda >> (bits - 1 - position)) & 1U) ? -1.0 : 1.0;
            }
        }
        double value = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < shape[0]; ++i) {
            for (std::size_t j = 0; j < shape[1]; ++j) {
                const double ab = signs[0][i] * signs[1][j];
                for (std::size_t k = 0; k < shape[2]; ++k, ++n) {
                    value += expr[n] * ab * signs[2][k];
                }
            }
        }
        if (value > best) {
            best = value;
            best_index = lambda;
        }
    }
    return {best, InstructionSet(shape, best_index)};
}

struct SettingsSearchResult {
    SettingsAssignment assignment;
    double value;
};

namespace detail {

inline MeasurementSetting random_setting(std::mt19937_64 &rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (;;) {
        const Eigen::Vector3d v(gauss(rng), gauss(rng), gauss(rng));
        if (v.norm() > 1e-6) {
            return MeasurementSetting::normalized(v);
        }
    }
}

/// Gradient of the quantum value with respect to one setting's Bloch vector.
/// The value is linear in that vector, so the gradient is exact.
inline Eigen::Vector3d setting_gradient(const BellExpression &expr, const QuantumState &state,
                                        const SettingsAssignment &assign, std::size_t party,
                                        std::size_t setting) {
    const std::array<Operator2, 3> paulis{pauli::x(), pauli::y(), pauli::z()};
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    const Shape &shape = expr.shape();
    for (std::size_t n = 0; n < shape.tuple_count(); ++n) {
        const SettingTuple t = shape.tuple(n);
        if (t[party] != setting || expr[n] == 0.0) {
            continue;
        }
        std::array<Operator2, kParties> ops;
        for (std::size_t p = 0; p < kParties; ++p) {
            ops[p] = observable(assign.setting(p, t[p]));
        }
        for (int a = 0; a < 3; ++a) {
            ops[party] = paulis[a];
            g[a] += expr[n] * expectation(state, ops[0], ops[1], ops[2]).real();
        }
    }
    return g;
}

}  // namespace detail

/**
 * Random-restart coordinate ascent over measurement directions.
 *
 * Each sweep replaces every Bloch vector in turn by the normalized gradient,
 * which is the exact maximizer with the other settings held fixed. Restart r
 * draws its starting point from a generator seeded with (seed, r).
 */
inline SettingsSearchResult optimize_settings(const BellExpression &expr, const QuantumState &state,
                                              std::size_t restarts, std::size_t iterations,
                                              std::uint64_t seed = 0) {
    if (restarts == 0 || iterations == 0) {
        throw std::invalid_argument("settings search needs positive restart and iteration budgets");
    }
    const Shape &shape = expr.shape();
    std::optional<SettingsSearchResult> best;
    for (std::size_t r = 0; r < restarts; ++r) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32U),
                          static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        std::array<std::vector<MeasurementSetting>, kParties> start;
        for (std::size_t p = 0; p < kParties; ++p) {
            for (std::size_t s = 0; s < shape[p]; ++s) {
                start[p].push_back(detail::random_setting(rng));
            }
        }
        SettingsAssignment assign(std::move(start));
        double value = quantum_value(expr, state, assign);
        for (std::size_t it = 0; it < iterations; ++it) {
            for (std::size_t p = 0; p < kParties; ++p) {
                for (std::size_t s = 0; s < shape[p]; ++s) {
                    const Eigen::Vector3d g = detail::setting_gradient(expr, state, assign, p, s);
                    if (g.norm() > 1e-14) {
                        assign.set(p, s, MeasurementSetting::normalized(g));
                    }
                }
            }
            const double next = quantum_value(expr, state, assign);
            const bool converged = next - value <= 1e-14;
            value = next;
            if (converged) {
                break;
            }
        }
        if (!best || value > best->value) {
            best = SettingsSearchResult{assign, value};
        }
    }
    return *best;
}

}  // namespace bellcheck
