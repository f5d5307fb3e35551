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
 * Local hidden-variable models: probability mixtures of instruction sets,
 * their correlation predictions, and least-squares fits to observed tables.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bellcheck/bell.hpp"
#include "bellcheck/frank_wolfe.hpp"
#include "bellcheck/instruction_set.hpp"
#include "bellcheck/rng.hpp"
#include "bellcheck/tables.hpp"

namespace bellcheck {

inline constexpr double kWeightSumTolerance = 1e-12;

/// Probability weights over every instruction set of a shape, in
/// lexicographic strategy order (see InstructionSet).
class LhvModel {
  public:
    LhvModel(Shape shape, std::vector<double> weights) : shape_(shape), weights_(std::move(weights)) {
        const std::uint64_t count = strategy_count(shape_);
        if (weights_.size() != count) {
            throw std::invalid_argument("LHV model for shape " + to_string(shape_) + " needs " +
                                        std::to_string(count) + " weights, got " +
                                        std::to_string(weights_.size()));
        }
        double total = 0.0;
        for (std::size_t n = 0; n < weights_.size(); ++n) {
            if (!std::isfinite(weights_[n]) || weights_[n] < 0.0) {
                throw std::invalid_argument("LHV weight " + std::to_string(n) +
                                            " is negative or not finite");
            }
            total += weights_[n];
        }
        if (std::abs(total - 1.0) > kWeightSumTolerance) {
            throw std::invalid_argument("LHV weights sum to " + std::to_string(total) +
                                        ", expected 1");
        }
    }

    static LhvModel uniform(Shape shape) {
        const std::uint64_t count = strategy_count(shape);
        return {shape, std::vector<double>(count, 1.0 / static_cast<double>(count))};
    }

    static LhvModel point_mass(const InstructionSet &strategy) {
        std::vector<double> w(strategy_count(strategy.shape()), 0.0);
        w[strategy.index()] = 1.0;
        return {strategy.shape(), std::move(w)};
    }

    const Shape &shape() const { return shape_; }
    const std::vector<double> &weights() const { return weights_; }
    std::size_t size() const { return weights_.size(); }

    Eigen::Map<const Eigen::VectorXd> as_vector() const {
        return {weights_.data(), static_cast<Eigen::Index>(weights_.size())};
    }

  private:
    Shape shape_;
    std::vector<double> weights_;
};

/// Tuples x strategies matrix of deterministic correlation values (+1/-1).
inline Eigen::MatrixXd vertex_correlations(const Shape &shape) {
    const auto strategies = enumerate_instruction_sets(shape);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(shape.tuple_count()),
                      static_cast<Eigen::Index>(strategies.size()));
    for (std::size_t s = 0; s < strategies.size(); ++s) {
        for (std::size_t n = 0; n < shape.tuple_count(); ++n) {
            m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(s)) =
                strategies[s].product(shape.tuple(n));
        }
    }
    return m;
}

inline CorrelationTable predictions(const LhvModel &model) {
    const Eigen::VectorXd e = vertex_correlations(model.shape()) * model.as_vector();
    std::vector<double> values(e.data(), e.data() + e.size());
    for (double &v : values) {
        v = std::clamp(v, -1.0, 1.0);
    }
    return {model.shape(), std::move(values)};
}

inline double model_bell_value(const LhvModel &model, const BellExpression &expr) {
    return evaluate(expr, predictions(model));
}

struct FitResult {
    LhvModel model;
    /// Sum of squared correlation differences over every tuple.
    double residual;
    std::size_t iterations_used;
    double duality_gap;
    std::vector<double> residual_history;
};

/**
 * Closest instruction-set mixture to an observed correlation table.
 *
 * Minimizes sum (E_model - E_obs)^2 over the weight simplex with Frank-Wolfe
 * started from the uniform mixture. The default away-step rule reaches the
 * duality-gap tolerance in a few hundred iterations; StepRule::open_loop is the
 * textbook 2/(t+2) schedule and converges only as 1/t.
 */
inline FitResult fit_to_data(const CorrelationTable &observed, std::size_t max_iterations = 10000,
                             double tolerance = 1e-8, StepRule rule = StepRule::away_steps) {
    // CorrelationTable already rejects entries outside [-1, 1] beyond the slack.
    const Shape &shape = observed.shape();
    const Eigen::VectorXd target =
        Eigen::Map<const Eigen::VectorXd>(observed.values().data(),
                                          static_cast<Eigen::Index>(observed.size()));
    const SquaredDistance objective(vertex_correlations(shape), target);
    const LhvModel start = LhvModel::uniform(shape);
    FrankWolfeResult fw = minimize_over_simplex(objective, start.as_vector(),
                                                {.max_iterations = max_iterations,
                                                 .gap_tolerance = tolerance,
                                                 .rule = rule});
    std::vector<double> weights(fw.weights.data(), fw.weights.data() + fw.weights.size());
    return {LhvModel(shape, std::move(weights)), std::max(fw.value, 0.0), fw.iterations, fw.gap,
            std::move(fw.history)};
}

struct BellMaximum {
    LhvModel model;
    double value;
};

/// Maximizes model_bell_value over the weight simplex by Frank-Wolfe.
inline BellMaximum maximize_bell_value(const BellExpression &expr,
                                       std::size_t max_iterations = 10000,
                                       double tolerance = 1e-8) {
    const Shape &shape = expr.shape();
    const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(
        expr.coefficients().data(), static_cast<Eigen::Index>(expr.coefficients().size()));
    const LinearCost cost(-(vertex_correlations(shape).transpose() * c));
    FrankWolfeResult fw = minimize_over_simplex(cost, LhvModel::uniform(shape).as_vector(),
                                                {.max_iterations = max_iterations,
                                                 .gap_tolerance = tolerance});
    LhvModel model(shape, std::vector<double>(fw.weights.data(), fw.weights.data() + fw.weights.size()));
    const double value = model_bell_value(model, expr);
    return {std::move(model), value};
}

/// Draws strategies from a model and reads off answers.
class LhvSampler {
  public:
    explicit LhvSampler(const LhvModel &model) : shape_(model.shape()), draw_(model.weights()) {}

    std::array<int, kParties> operator()(const SettingTuple &settings, Rng &rng) const {
        const InstructionSet strategy(shape_, draw_(rng));
        return {strategy.outcome(0, settings[0]), strategy.outcome(1, settings[1]),
                strategy.outcome(2, settings[2])};
    }

  private:
    Shape shape_;
    DiscreteSampler draw_;
};

/// One (+-1, +-1, +-1) outcome triple for the given joint setting.
inline std::array<int, kParties> sample_outcome(const LhvModel &model, const SettingTuple &settings,
                                                Rng &rng) {
    return LhvSampler(model)(settings, rng);
}

}  // namespace bellcheck
