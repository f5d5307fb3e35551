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

#include "bellcheck/lhv.hpp"

#include <random>

#include "gtest/gtest.h"

#include "support/oracles.hpp"

using namespace bellcheck;

namespace {

const Shape kMermin(2, 2, 2);

std::vector<double> random_simplex_point(std::mt19937_64 &rng, std::size_t n) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(n);
    double total = 0.0;
    for (double &v : w) total += (v = e(rng));
    for (double &v : w) v /= total;
    return w;
}

CorrelationTable noisy_ghz_table(double v) {
    const Shape s = kMermin;
    std::vector<double> e(8, 0.0);
    e[s.index({0, 0, 0})] = v;
    e[s.index({0, 1, 1})] = -v;
    e[s.index({1, 0, 1})] = -v;
    e[s.index({1, 1, 0})] = -v;
    return {s, e};
}

}  // namespace

TEST(InstructionSets, CountAndOrder) {
    EXPECT_EQ(strategy_count(kMermin), 64U);
    EXPECT_EQ(strategy_count(Shape(1, 1, 1)), 8U);
    const auto all = enumerate_instruction_sets(kMermin);
    ASSERT_EQ(all.size(), 64U);
    for (std::size_t p = 0; p < 3; ++p)
        for (std::size_t s = 0; s < 2; ++s) {
            EXPECT_EQ(all.front().outcome(p, s), 1);
            EXPECT_EQ(all.back().outcome(p, s), -1);
        }
    // Index 1 flips only the last answer: party 3, setting 1.
    EXPECT_EQ(all[1].outcome(2, 1), -1);
    EXPECT_EQ(all[1].outcome(2, 0), 1);
    // Index 32 flips only the first: party 1, setting 0.
    EXPECT_EQ(all[32].outcome(0, 0), -1);
    EXPECT_EQ(all[32].outcome(0, 1), 1);
    EXPECT_THROW(InstructionSet(kMermin, 64), std::out_of_range);
}

TEST(InstructionSets, DistinctAnswerTables) {
    const auto all = enumerate_instruction_sets(Shape(2, 1, 3));
    std::set<std::vector<std::vector<int>>> tables;
    for (const auto &s : all) tables.insert(s.table());
    EXPECT_EQ(tables.size(), all.size());
}

TEST(LhvModel, ValidatesWeights) {
    EXPECT_THROW(LhvModel(kMermin, std::vector<double>(63, 1.0 / 63)), std::invalid_argument);
    std::vector<double> w(64, 1.0 / 64);
    w[0] = -w[0];
    EXPECT_THROW(LhvModel(kMermin, w), std::invalid_argument);
    EXPECT_THROW(LhvModel(kMermin, std::vector<double>(64, 1.0 / 32)), std::invalid_argument);
    EXPECT_NO_THROW(LhvModel::uniform(kMermin));
}

TEST(Predictions, UniformMixtureVanishes) {
    // Pairing each strategy with its party-1 flip cancels every product.
    const auto e = predictions(LhvModel::uniform(kMermin));
    for (double v : e.values()) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Predictions, PointMassIsDeterministic) {
    for (std::uint64_t s = 0; s < 64; ++s) {
        const InstructionSet strategy(kMermin, s);
        const auto e = predictions(LhvModel::point_mass(strategy));
        for (std::size_t n = 0; n < 8; ++n) {
            EXPECT_EQ(e[n], strategy.product(kMermin.tuple(n)));
        }
    }
}

TEST(Predictions, PartyOneFlipNegatesTable) {
    std::mt19937_64 rng(5);
    const std::uint64_t party1 = 0b110000;
    for (int trial = 0; trial < 20; ++trial) {
        const auto w = random_simplex_point(rng, 64);
        std::vector<double> flipped(64);
        for (std::uint64_t s = 0; s < 64; ++s) flipped[s ^ party1] = w[s];
        const auto a = predictions(LhvModel(kMermin, w));
        const auto b = predictions(LhvModel(kMermin, flipped));
        for (std::size_t n = 0; n < 8; ++n) EXPECT_NEAR(a[n], -b[n], 1e-14);
    }
}

TEST(Predictions, AffineInWeights) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const auto w1 = random_simplex_point(rng, 64);
        const auto w2 = random_simplex_point(rng, 64);
        const double t = std::uniform_real_distribution<double>(0, 1)(rng);
        std::vector<double> mix(64);
        for (std::size_t s = 0; s < 64; ++s) mix[s] = t * w1[s] + (1 - t) * w2[s];
        const auto a = predictions(LhvModel(kMermin, w1));
        const auto b = predictions(LhvModel(kMermin, w2));
        const auto m = predictions(LhvModel(kMermin, mix));
        for (std::size_t n = 0; n < 8; ++n) EXPECT_NEAR(m[n], t * a[n] + (1 - t) * b[n], 1e-14);
    }
}

TEST(ModelBellValue, WitnessUniformAndMixtures) {
    const auto m = mermin3().expression;
    const auto bound = lhv_bound(m);
    EXPECT_NEAR(model_bell_value(LhvModel::point_mass(bound.witness), m), 2.0, 1e-15);
    EXPECT_NEAR(model_bell_value(LhvModel::uniform(kMermin), m), 0.0, 1e-14);

    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 500; ++trial) {
        const double value = model_bell_value(LhvModel(kMermin, random_simplex_point(rng, 64)), m);
        EXPECT_LE(std::abs(value), 2.0 + 1e-9);
    }
}

TEST(FitToData, RealizableTargetIsReached) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const LhvModel truth(kMermin, random_simplex_point(rng, 64));
        const auto fit = fit_to_data(predictions(truth));
        EXPECT_LE(fit.residual, 1e-6);
    }
    const auto zero = fit_to_data(CorrelationTable(kMermin));
    EXPECT_LE(zero.residual, 1e-6);
}

TEST(FitToData, NoisyGhzMatchesHullProjection) {
    const auto target = noisy_ghz_table(0.71);
    std::array<double, 8> t{};
    for (std::size_t n = 0; n < 8; ++n) t[n] = target[n];
    const auto vertices = oracle::local_vertices_222();
    ASSERT_EQ(vertices.size(), 16U);
    const double oracle_residual = oracle::min_squared_distance_to_hull(vertices, t);

    const auto fit = fit_to_data(target);
    EXPECT_GT(fit.residual, 0.0);
    EXPECT_NEAR(fit.residual, oracle_residual, 1e-4);
    EXPECT_LE(fit.duality_gap, 1e-8);
    EXPECT_LE(model_bell_value(fit.model, mermin3().expression), 2.0 + 1e-9);
}

TEST(FitToData, HullProjectionAgreesOnRandomTargets) {
    const auto vertices = oracle::local_vertices_222();
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::array<double, 8> t{};
        for (double &v : t) v = u(rng);
        const auto fit = fit_to_data(CorrelationTable(kMermin, {t.begin(), t.end()}));
        EXPECT_NEAR(fit.residual, oracle::min_squared_distance_to_hull(vertices, t), 1e-6);
    }
}

TEST(FitToData, HistoryIsMonotone) {
    for (auto rule : {StepRule::away_steps, StepRule::open_loop}) {
        const auto fit = fit_to_data(noisy_ghz_table(0.71), 500, 1e-8, rule);
        ASSERT_FALSE(fit.residual_history.empty());
        for (std::size_t n = 1; n < fit.residual_history.size(); ++n) {
            EXPECT_LE(fit.residual_history[n], fit.residual_history[n - 1] + 1e-15);
        }
    }
}

TEST(FitToData, RejectsOutOfRangeTable) {
    EXPECT_THROW(CorrelationTable(kMermin, std::vector<double>(8, 1.5)), std::invalid_argument);
}

TEST(MaximizeBellValue, AgreesWithEnumeration) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    EXPECT_NEAR(maximize_bell_value(mermin3().expression).value, 2.0, 1e-6);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> c(8);
        for (double &v : c) v = u(rng);
        const BellExpression e(kMermin, c);
        EXPECT_NEAR(maximize_bell_value(e).value, lhv_bound(e).value, 1e-6);
    }
}

TEST(SampleOutcome, DeterministicForSeed) {
    const auto model = LhvModel::uniform(kMermin);
    Rng a(77), b(77);
    for (int n = 0; n < 1000; ++n) {
        EXPECT_EQ(sample_outcome(model, {1, 0, 1}, a), sample_outcome(model, {1, 0, 1}, b));
    }
}

TEST(SampleOutcome, PointMassRepeatsItsAnswers) {
    const InstructionSet strategy(kMermin, 0b101100);
    const auto model = LhvModel::point_mass(strategy);
    Rng rng(1);
    for (std::size_t n = 0; n < 8; ++n) {
        const auto t = kMermin.tuple(n);
        const auto o = sample_outcome(model, t, rng);
        for (std::size_t p = 0; p < 3; ++p) EXPECT_EQ(o[p], strategy.outcome(p, t[p]));
    }
}

TEST(SampleOutcome, UniformMarginalsAreUnbiased) {
    const LhvSampler sampler(LhvModel::uniform(kMermin));
    Rng rng(2);
    constexpr int kShots = 100000;
    std::array<long, 3> sums{};
    long product = 0;
    for (int n = 0; n < kShots; ++n) {
        const auto o = sampler({0, 1, 1}, rng);
        for (std::size_t p = 0; p < 3; ++p) sums[p] += o[p];
        product += o[0] * o[1] * o[2];
    }
    const double bound = 4.0 / std::sqrt(kShots);
    for (long s : sums) EXPECT_LE(std::abs(static_cast<double>(s) / kShots), bound);
    EXPECT_LE(std::abs(static_cast<double>(product) / kShots), bound);
}
