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
 * Finite-statistics Bell experiments: click-count simulation from quantum or
 * instruction-set sources, correlation estimates with standard errors, the
 * one-parameter visibility fit and the quantum-vs-local proximity contest.
 *
 * Every joint-setting tuple is sampled in its own block from the stream
 * tuple_stream(seed, flat tuple index), and the estimates of different tuples
 * are treated as independent. Imported data with shared systematics across
 * tuples falls outside that error model.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bellcheck/bell.hpp"
#include "bellcheck/lhv.hpp"
#include "bellcheck/quantum.hpp"
#include "bellcheck/rng.hpp"
#include "bellcheck/tables.hpp"

namespace bellcheck {

/// Absolute residual difference below which the comparison is a tie.
inline constexpr double kVerdictTieTolerance = 1e-9;

struct ExperimentConfig {
    std::uint64_t shots_per_setting = 1;
    std::uint64_t seed = 0;
    SettingsAssignment assignment;
    BellExpression expression;

    void validate() const {
        if (shots_per_setting == 0) {
            throw std::invalid_argument("shots per setting must be at least 1");
        }
        assignment.require_shape(expression.shape());
    }
};

using OutcomeCounts = std::array<std::uint64_t, kOutcomes>;

/// Outcome counts for every joint-setting tuple of an assignment.
class Dataset {
  public:
    Dataset(SettingsAssignment assignment, std::uint64_t shots_per_setting,
            std::vector<OutcomeCounts> counts)
        : assignment_(std::move(assignment)),
          shots_(shots_per_setting),
          counts_(std::move(counts)) {
        const Shape shape = assignment_.shape();
        if (shots_ == 0) {
            throw std::invalid_argument("dataset needs at least one shot per setting");
        }
        if (counts_.size() != shape.tuple_count()) {
            throw std::invalid_argument("dataset has " + std::to_string(counts_.size()) +
                                        " tuples, assignment shape " + to_string(shape) +
                                        " needs " + std::to_string(shape.tuple_count()));
        }
        for (std::size_t n = 0; n < counts_.size(); ++n) {
            std::uint64_t total = 0;
            for (auto c : counts_[n]) {
                total += c;
            }
            if (total != shots_) {
                const auto t = shape.tuple(n);
                throw std::invalid_argument(
                    "counts for settings [" + std::to_string(t[0]) + "," + std::to_string(t[1]) +
                    "," + std::to_string(t[2]) + "] sum to " + std::to_string(total) +
                    ", expected " + std::to_string(shots_));
            }
        }
    }

    const SettingsAssignment &assignment() const { return assignment_; }
    Shape shape() const { return assignment_.shape(); }
    std::uint64_t shots_per_setting() const { return shots_; }
    const std::vector<OutcomeCounts> &counts() const { return counts_; }
    const OutcomeCounts &counts(const SettingTuple &t) const { return counts_[shape().index(t)]; }

    friend bool operator==(const Dataset &, const Dataset &) = default;

  private:
    SettingsAssignment assignment_;
    std::uint64_t shots_;
    std::vector<OutcomeCounts> counts_;
};

namespace detail {

template <typename DrawOutcome>
Dataset simulate_blocks(const ExperimentConfig &config, DrawOutcome &&draw) {
    config.validate();
    const Shape shape = config.assignment.shape();
    std::vector<OutcomeCounts> counts(shape.tuple_count());
    for (std::size_t n = 0; n < shape.tuple_count(); ++n) {
        Rng rng = tuple_stream(config.seed, n);
        counts[n] = draw(shape.tuple(n), config.shots_per_setting, rng);
    }
    return {config.assignment, config.shots_per_setting, std::move(counts)};
}

}  // namespace detail

inline Dataset simulate_quantum(const QuantumState &state, const ExperimentConfig &config) {
    const auto &assign = config.assignment;
    return detail::simulate_blocks(config, [&](const SettingTuple &t, std::uint64_t shots, Rng &rng) {
        const auto probs = outcome_distribution(state, assign.setting(0, t[0]),
                                                assign.setting(1, t[1]), assign.setting(2, t[2]));
        const DiscreteSampler sampler(probs);
        OutcomeCounts counts{};
        for (std::uint64_t s = 0; s < shots; ++s) {
            ++counts[sampler(rng)];
        }
        return counts;
    });
}

inline Dataset simulate_lhv(const LhvModel &model, const ExperimentConfig &config) {
    if (model.shape() != config.assignment.shape()) {
        throw std::invalid_argument("LHV model shape " + to_string(model.shape()) +
                                    " does not match assignment shape " +
                                    to_string(config.assignment.shape()));
    }
    const LhvSampler sampler(model);
    return detail::simulate_blocks(config, [&](const SettingTuple &t, std::uint64_t shots, Rng &rng) {
        OutcomeCounts counts{};
        for (std::uint64_t s = 0; s < shots; ++s) {
            ++counts[outcome_index(sampler(t, rng))];
        }
        return counts;
    });
}

/// Sample mean of the outcome product with its binomial standard error.
///
/// shots == 0 marks an exact (infinite-statistics) value with zero error.
struct CorrelationEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::uint64_t shots = 0;
};

class EstimateTable {
  public:
    EstimateTable(Shape shape, std::vector<CorrelationEstimate> entries)
        : shape_(shape), entries_(std::move(entries)) {
        if (entries_.size() != shape_.tuple_count()) {
            throw std::invalid_argument("estimate table size does not match shape " +
                                        to_string(shape_));
        }
        for (const auto &e : entries_) {
            if (!std::isfinite(e.mean) || std::abs(e.mean) > 1.0 + kCorrelationSlack ||
                !std::isfinite(e.standard_error) || e.standard_error < 0.0) {
                throw std::invalid_argument("correlation estimate out of range");
            }
        }
    }

    /// Exact values with zero standard error.
    static EstimateTable exact(const CorrelationTable &table) {
        std::vector<CorrelationEstimate> entries;
        entries.reserve(table.size());
        for (double v : table.values()) {
            entries.push_back({v, 0.0, 0});
        }
        return {table.shape(), std::move(entries)};
    }

    const Shape &shape() const { return shape_; }
    std::size_t size() const { return entries_.size(); }
    const CorrelationEstimate &operator[](std::size_t flat) const { return entries_.at(flat); }
    const std::vector<CorrelationEstimate> &entries() const { return entries_; }

    CorrelationTable means() const {
        std::vector<double> m;
        m.reserve(entries_.size());
        for (const auto &e : entries_) {
            m.push_back(e.mean);
        }
        return {shape_, std::move(m)};
    }

  private:
    Shape shape_;
    std::vector<CorrelationEstimate> entries_;
};

inline CorrelationEstimate estimate_from_counts(const OutcomeCounts &counts) {
    std::uint64_t shots = 0;
    std::int64_t signed_sum = 0;
    for (std::size_t o = 0; o < kOutcomes; ++o) {
        shots += counts[o];
        signed_sum += outcome_product(o) * static_cast<std::int64_t>(counts[o]);
    }
    if (shots == 0) {
        throw std::invalid_argument("cannot estimate a correlation from zero shots");
    }
    const double n = static_cast<double>(shots);
    const double mean = static_cast<double>(signed_sum) / n;
    return {mean, std::sqrt(std::max(0.0, 1.0 - mean * mean) / n), shots};
}

inline EstimateTable estimate_correlations(const Dataset &data) {
    std::vector<CorrelationEstimate> entries;
    entries.reserve(data.counts().size());
    for (const auto &c : data.counts()) {
        entries.push_back(estimate_from_counts(c));
    }
    return {data.shape(), std::move(entries)};
}

struct BellEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

/// Linear combination of estimated correlations; errors added in quadrature.
inline BellEstimate estimate_bell(const BellExpression &expr, const EstimateTable &estimates) {
    if (expr.shape() != estimates.shape()) {
        throw std::invalid_argument("estimate table shape " + to_string(estimates.shape()) +
                                    " does not match expression shape " +
                                    to_string(expr.shape()));
    }
    double value = 0.0;
    double variance = 0.0;
    for (std::size_t n = 0; n < estimates.size(); ++n) {
        value += expr[n] * estimates[n].mean;
        variance += expr[n] * expr[n] * estimates[n].standard_error * estimates[n].standard_error;
    }
    return {value, std::sqrt(variance)};
}

struct VisibilityFit {
    /// Least-squares weight of the pure reference table, clamped to [0, 1].
    double visibility = 0.0;
    /// Sum over every tuple of (E_obs - visibility * E_ref)^2.
    double residual = 0.0;
    /// Propagated standard error of the unclamped estimate.
    double standard_error = 0.0;
};

/**
 * Fits E_obs ~ v * E_ref, the correlation table of the white-noise/GHZ family.
 *
 * `reference` is the pure-state table for the same assignment; tuples where it
 * vanishes carry no information about v but still count in the residual.
 */
inline VisibilityFit fit_visibility(const EstimateTable &estimates,
                                    const CorrelationTable &reference) {
    if (estimates.shape() != reference.shape()) {
        throw std::invalid_argument("reference table shape does not match the estimates");
    }
    double cross = 0.0;
    double norm = 0.0;
    double variance = 0.0;
    for (std::size_t n = 0; n < reference.size(); ++n) {
        const double ref = reference[n];
        if (std::abs(ref) <= kAlgebraicTolerance) {
            continue;
        }
        cross += estimates[n].mean * ref;
        norm += ref * ref;
        variance += ref * ref * estimates[n].standard_error * estimates[n].standard_error;
    }
    if (norm == 0.0) {
        throw std::invalid_argument("reference correlation table is identically zero");
    }
    VisibilityFit fit;
    fit.visibility = std::clamp(cross / norm, 0.0, 1.0);
    fit.standard_error = std::sqrt(variance) / norm;
    for (std::size_t n = 0; n < reference.size(); ++n) {
        const double d = estimates[n].mean - fit.visibility * reference[n];
        fit.residual += d * d;
    }
    return fit;
}

enum class Verdict { quantum_closer, lhv_closer, tie };

inline std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::quantum_closer:
        return "quantum_closer";
    case Verdict::lhv_closer:
        return "lhv_closer";
    case Verdict::tie:
        return "tie";
    }
    return "unknown";
}

inline Verdict decide(double quantum_residual, double lhv_residual,
                      double tie_tolerance = kVerdictTieTolerance) {
    if (quantum_residual < lhv_residual - tie_tolerance) {
        return Verdict::quantum_closer;
    }
    if (lhv_residual < quantum_residual - tie_tolerance) {
        return Verdict::lhv_closer;
    }
    return Verdict::tie;
}

struct ComparisonReport {
    VisibilityFit quantum_fit;
    FitResult lhv_fit;
    BellEstimate mermin_estimate;
    /// Bell value of the best-fit local model; never above the local bound.
    double lhv_bell_value = 0.0;
    Verdict verdict = Verdict::tie;

    // Per-tuple tables for auditing other distance measures.
    CorrelationTable observed;
    CorrelationTable quantum_prediction;
    CorrelationTable lhv_prediction;
};

struct CompareOptions {
    std::size_t max_iterations = 10000;
    double tolerance = 1e-8;
};

/// Which family, noisy GHZ or instruction-set mixtures, lies closer to the estimates.
inline ComparisonReport compare_estimates(const EstimateTable &estimates,
                                          const BellExpression &expr,
                                          const SettingsAssignment &assignment,
                                          const CompareOptions &options = {}) {
    assignment.require_shape(expr.shape());
    if (estimates.shape() != expr.shape()) {
        throw std::invalid_argument("data shape " + to_string(estimates.shape()) +
                                    " does not cover the expression shape " +
                                    to_string(expr.shape()));
    }
    const CorrelationTable reference = quantum_correlations(ghz_state(), assignment);
    const CorrelationTable observed = estimates.means();

    VisibilityFit quantum_fit = fit_visibility(estimates, reference);
    FitResult lhv_fit = fit_to_data(observed, options.max_iterations, options.tolerance);
    const double lhv_value = model_bell_value(lhv_fit.model, expr);
    const Verdict verdict = decide(quantum_fit.residual, lhv_fit.residual);
    CorrelationTable lhv_prediction = predictions(lhv_fit.model);
    CorrelationTable quantum_prediction = reference.scaled(quantum_fit.visibility);
    return {quantum_fit,
            std::move(lhv_fit),
            estimate_bell(expr, estimates),
            lhv_value,
            verdict,
            observed,
            std::move(quantum_prediction),
            std::move(lhv_prediction)};
}

inline ComparisonReport compare_models(const Dataset &data, const BellExpression &expr,
                                       const SettingsAssignment &assignment,
                                       const CompareOptions &options = {}) {
    return compare_estimates(estimate_correlations(data), expr, assignment, options);
}

}  // namespace bellcheck
