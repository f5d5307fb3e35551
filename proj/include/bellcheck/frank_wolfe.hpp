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
 * Conditional-gradient (Frank-Wolfe) minimization over the probability
 * simplex.
 *
 * The linear minimization oracle over the simplex is "pick the coordinate with
 * the smallest gradient entry", so every iterate is a sparse convex
 * combination of vertices and never needs a projection.
 */

#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace bellcheck {

template <typename P>
concept SimplexObjective = requires(const P &problem, const Eigen::VectorXd &w) {
    { problem.value(w) } -> std::convertible_to<double>;
    { problem.gradient(w) } -> std::convertible_to<Eigen::VectorXd>;
};

/// Objectives that can minimize themselves exactly along w + gamma * d,
/// gamma in [0, max_step].
template <typename P>
concept ExactLineSearch = SimplexObjective<P> &&
    requires(const P &problem, const Eigen::VectorXd &w, const Eigen::VectorXd &d, double max_step) {
        { problem.exact_step(w, d, max_step) } -> std::convertible_to<double>;
    };

enum class StepRule {
    /// Toward-vertex steps of length 2/(t+2).
    open_loop,
    /// Toward or away steps with exact line search; converges linearly on
    /// polytopes. Requires an ExactLineSearch objective.
    away_steps,
};

/// Weights below this are dropped from the active set under away steps.
inline constexpr double kActiveWeightFloor = 1e-15;

struct FrankWolfeOptions {
    std::size_t max_iterations = 10000;
    double gap_tolerance = 1e-8;
    StepRule rule = StepRule::open_loop;
};

struct FrankWolfeResult {
    Eigen::VectorXd weights;
    double value = 0.0;
    /// <grad, w - s> at the returned point; upper-bounds value - optimum for convex objectives.
    double gap = 0.0;
    std::size_t iterations = 0;
    /// Objective before the first step and after every step.
    std::vector<double> history;
};

/// Least squares ||M w - target||^2 where the columns of M are vertex images.
class SquaredDistance {
  public:
    SquaredDistance(Eigen::MatrixXd vertices, Eigen::VectorXd target)
        : vertices_(std::move(vertices)), target_(std::move(target)) {
        if (vertices_.rows() != target_.size()) {
            throw std::invalid_argument("vertex matrix rows do not match target length");
        }
    }

    double value(const Eigen::VectorXd &w) const { return (vertices_ * w - target_).squaredNorm(); }

    Eigen::VectorXd gradient(const Eigen::VectorXd &w) const {
        return 2.0 * vertices_.transpose() * (vertices_ * w - target_);
    }

    double exact_step(const Eigen::VectorXd &w, const Eigen::VectorXd &d, double max_step) const {
        const Eigen::VectorXd md = vertices_ * d;
        const double curvature = md.squaredNorm();
        if (curvature <= 0.0) {
            return 0.0;
        }
        const double slope = (vertices_ * w - target_).dot(md);
        return std::clamp(-slope / curvature, 0.0, max_step);
    }

  private:
    Eigen::MatrixXd vertices_;
    Eigen::VectorXd target_;
};

/// c . w
class LinearCost {
  public:
    explicit LinearCost(Eigen::VectorXd cost) : cost_(std::move(cost)) {}
    double value(const Eigen::VectorXd &w) const { return cost_.dot(w); }
    Eigen::VectorXd gradient(const Eigen::VectorXd &) const { return cost_; }

  private:
    Eigen::VectorXd cost_;
};

/**
 * Frank-Wolfe minimization over the simplex, starting from `weights`.
 *
 * With the open-loop rule, a step that would increase the objective is
 * replaced by the exact line-search step (when the objective provides one) or
 * skipped. Away steps always use exact line search. The recorded objective
 * sequence is non-increasing up to rounding in the last place.
 * Stops once the duality gap drops to the tolerance or the iteration budget
 * is spent.
 */
template <SimplexObjective Problem>
FrankWolfeResult minimize_over_simplex(const Problem &problem, Eigen::VectorXd weights,
                                       const FrankWolfeOptions &options = {}) {
    if (weights.size() == 0) {
        throw std::invalid_argument("empty simplex");
    }
    if (options.rule == StepRule::away_steps && !ExactLineSearch<Problem>) {
        throw std::invalid_argument("away steps need an objective with exact line search");
    }
    FrankWolfeResult result;
    double value = problem.value(weights);
    result.history.push_back(value);

    Eigen::Index toward = 0;
    Eigen::VectorXd grad = problem.gradient(weights);
    auto update_gap = [&] {
        grad.minCoeff(&toward);
        return grad.dot(weights) - grad[toward];
    };
    double gap = update_gap();

    std::size_t t = 0;
    for (; t < options.max_iterations && gap > options.gap_tolerance; ++t) {
        Eigen::VectorXd direction = -weights;
        direction[toward] += 1.0;
        Eigen::VectorXd candidate;
        double candidate_value = value;

        if constexpr (ExactLineSearch<Problem>) {
            if (options.rule == StepRule::away_steps) {
                // Away vertex: the active coordinate with the largest gradient.
                Eigen::Index away = -1;
                for (Eigen::Index i = 0; i < weights.size(); ++i) {
                    if (weights[i] > 0.0 && (away < 0 || grad[i] > grad[away])) {
                        away = i;
                    }
                }
                const double away_gap = grad[away] - grad.dot(weights);
                double max_step = 1.0;
                const bool away_step = away_gap > gap && weights[away] < 1.0;
                if (away_step) {
                    direction = weights;
                    direction[away] -= 1.0;
                    max_step = weights[away] / (1.0 - weights[away]);
                }
                const double step = problem.exact_step(weights, direction, max_step);
                candidate = weights + step * direction;
                if (away_step && step == max_step) {
                    // Drop step: the away vertex leaves the active set exactly.
                    candidate[away] = 0.0;
                }
                // Rounding dust would otherwise pin the away vertex with a vanishing step.
                candidate = (candidate.array() < kActiveWeightFloor).select(0.0, candidate);
                candidate_value = problem.value(candidate);
            }
        }
        if (options.rule == StepRule::open_loop) {
            const double step = 2.0 / (static_cast<double>(t) + 2.0);
            candidate = weights + step * direction;
            candidate_value = problem.value(candidate);
            if constexpr (ExactLineSearch<Problem>) {
                if (candidate_value > value) {
                    candidate = weights + problem.exact_step(weights, direction, 1.0) * direction;
                    candidate_value = problem.value(candidate);
                }
            }
        }
        // Exact line-search steps never increase the objective in exact
        // arithmetic; near the optimum their effect is below rounding, so they
        // are taken without comparing values.
        if (options.rule == StepRule::away_steps || candidate_value <= value) {
            weights = std::move(candidate);
            value = candidate_value;
        }
        result.history.push_back(value);

        grad = problem.gradient(weights);
        gap = update_gap();
    }

    // Keep the iterate on the simplex despite accumulated rounding.
    weights = weights.cwiseMax(0.0);
    weights /= weights.sum();

    result.value = problem.value(weights);
    result.weights = std::move(weights);
    result.gap = gap;
    result.iterations = t;
    return result;
}

}  // namespace bellcheck
