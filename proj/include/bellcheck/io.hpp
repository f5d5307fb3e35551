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
 * JSON and CSV forms of expressions, assignments, LHV models, datasets and
 * comparison reports.
 *
 * Readers throw FormatError carrying a JSON-pointer style path to the
 * offending element. Writers round floating-point values to 12 significant
 * digits.
 */

#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "bellcheck/bell.hpp"
#include "bellcheck/experiment.hpp"
#include "bellcheck/lhv.hpp"

namespace bellcheck {

using Json = nlohmann::json;

class FormatError : public std::runtime_error {
  public:
    FormatError(const std::string &path, const std::string &message)
        : std::runtime_error((path.empty() ? std::string("/") : path) + ": " + message),
          path_(path.empty() ? "/" : path) {}

    const std::string &path() const { return path_; }

  private:
    std::string path_;
};

/// Rounds to 12 significant digits for output.
inline double round12(double v) {
    if (!std::isfinite(v) || v == 0.0) {
        return v == 0.0 ? 0.0 : v;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    const double r = std::strtod(buf, nullptr);
    return r == 0.0 ? 0.0 : r;
}

/// Rounds to a fixed number of decimal places; for values checked against an
/// absolute tolerance.
inline double round_decimals(double v, int places = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    const double r = std::strtod(buf, nullptr);
    return r == 0.0 ? 0.0 : r;
}

namespace detail {

inline const Json &member(const Json &j, const std::string &key, const std::string &path) {
    if (!j.is_object()) {
        throw FormatError(path, "expected an object");
    }
    const auto it = j.find(key);
    if (it == j.end()) {
        throw FormatError(path, "missing key \"" + key + "\"");
    }
    return *it;
}

inline double number(const Json &j, const std::string &path) {
    if (!j.is_number()) {
        throw FormatError(path, "expected a number");
    }
    return j.get<double>();
}

inline std::uint64_t count(const Json &j, const std::string &path) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
        throw FormatError(path, "expected a nonnegative integer");
    }
    return j.get<std::uint64_t>();
}

inline const Json &array(const Json &j, const std::string &path,
                         std::optional<std::size_t> size = std::nullopt) {
    if (!j.is_array()) {
        throw FormatError(path, "expected an array");
    }
    if (size && j.size() != *size) {
        throw FormatError(path, "expected " + std::to_string(*size) + " elements, got " +
                                    std::to_string(j.size()));
    }
    return j;
}

inline Shape shape_from_json(const Json &j, const std::string &path) {
    array(j, path, kParties);
    std::array<std::size_t, kParties> k{};
    for (std::size_t p = 0; p < kParties; ++p) {
        k[p] = count(j[p], path + "/" + std::to_string(p));
        if (k[p] == 0) {
            throw FormatError(path + "/" + std::to_string(p), "setting count must be positive");
        }
    }
    return {k[0], k[1], k[2]};
}

inline SettingTuple tuple_from_json(const Json &j, const Shape &shape, const std::string &path) {
    array(j, path, kParties);
    SettingTuple t{};
    for (std::size_t p = 0; p < kParties; ++p) {
        t[p] = count(j[p], path + "/" + std::to_string(p));
        if (t[p] >= shape[p]) {
            throw FormatError(path + "/" + std::to_string(p),
                              "setting index out of range for shape " + to_string(shape));
        }
    }
    return t;
}

inline Json shape_to_json(const Shape &s) { return Json::array({s[0], s[1], s[2]}); }

inline Json tuple_to_json(const SettingTuple &t) { return Json::array({t[0], t[1], t[2]}); }

/// Runs a constructor that validates invariants, reporting failures at `path`.
template <typename F>
auto validated(const std::string &path, F &&make) {
    try {
        return make();
    } catch (const std::invalid_argument &e) {
        throw FormatError(path, e.what());
    } catch (const std::out_of_range &e) {
        throw FormatError(path, e.what());
    } catch (const std::length_error &e) {
        throw FormatError(path, e.what());
    }
}

}  // namespace detail

inline Json parse_json(std::istream &in, const std::string &source) {
    try {
        return Json::parse(in);
    } catch (const Json::parse_error &e) {
        throw FormatError("", source + ": " + e.what());
    }
}

// Bell expressions: {"settings": [2,2,2], "coefficients": [{"tuple": [0,0,0], "c": 1.0}, ...]}
// Tuples left out have coefficient 0.

inline Json to_json(const BellExpression &expr) {
    Json coefficients = Json::array();
    for (std::size_t n = 0; n < expr.shape().tuple_count(); ++n) {
        if (expr[n] != 0.0) {
            coefficients.push_back(
                {{"tuple", detail::tuple_to_json(expr.shape().tuple(n))}, {"c", round12(expr[n])}});
        }
    }
    return {{"settings", detail::shape_to_json(expr.shape())}, {"coefficients", coefficients}};
}

inline BellExpression expression_from_json(const Json &j, const std::string &path = "") {
    const Shape shape = detail::validated(path + "/settings", [&] {
        return detail::shape_from_json(detail::member(j, "settings", path), path + "/settings");
    });
    const Json &list = detail::array(detail::member(j, "coefficients", path), path + "/coefficients");
    std::vector<double> c(shape.tuple_count(), 0.0);
    std::vector<bool> seen(shape.tuple_count(), false);
    for (std::size_t n = 0; n < list.size(); ++n) {
        const std::string at = path + "/coefficients/" + std::to_string(n);
        const SettingTuple t = detail::tuple_from_json(detail::member(list[n], "tuple", at), shape,
                                                       at + "/tuple");
        const std::size_t flat = shape.index(t);
        if (seen[flat]) {
            throw FormatError(at + "/tuple", "duplicate tuple");
        }
        seen[flat] = true;
        c[flat] = detail::number(detail::member(list[n], "c", at), at + "/c");
    }
    return detail::validated(path, [&] { return BellExpression(shape, std::move(c)); });
}

// Assignments: one array of Bloch 3-vectors per party.

inline Json to_json(const SettingsAssignment &assign) {
    Json parties = Json::array();
    for (std::size_t p = 0; p < kParties; ++p) {
        Json list = Json::array();
        for (const auto &s : assign.party(p)) {
            list.push_back({round12(s.x()), round12(s.y()), round12(s.z())});
        }
        parties.push_back(list);
    }
    return parties;
}

/// Bloch vectors are renormalized after reading, so 12-digit files round-trip.
inline SettingsAssignment assignment_from_json(const Json &j, const std::string &path = "") {
    detail::array(j, path, kParties);
    std::array<std::vector<MeasurementSetting>, kParties> parties;
    for (std::size_t p = 0; p < kParties; ++p) {
        const std::string party_path = path + "/" + std::to_string(p);
        const Json &list = detail::array(j[p], party_path);
        if (list.empty()) {
            throw FormatError(party_path, "party has no settings");
        }
        for (std::size_t s = 0; s < list.size(); ++s) {
            const std::string at = party_path + "/" + std::to_string(s);
            detail::array(list[s], at, 3);
            const Eigen::Vector3d v(detail::number(list[s][0], at + "/0"),
                                    detail::number(list[s][1], at + "/1"),
                                    detail::number(list[s][2], at + "/2"));
            if (std::abs(v.norm() - 1.0) > 1e-9) {
                throw FormatError(at, "Bloch vector is not unit length (norm " +
                                          std::to_string(v.norm()) + ")");
            }
            parties[p].push_back(MeasurementSetting::normalized(v));
        }
    }
    return SettingsAssignment(std::move(parties));
}

// LHV models: {"settings": [2,2,2], "weights": [w0, ..., w63]} in strategy order.

inline Json to_json(const LhvModel &model) {
    Json weights = Json::array();
    for (double w : model.weights()) {
        weights.push_back(round12(w));
    }
    return {{"settings", detail::shape_to_json(model.shape())}, {"weights", weights}};
}

/// Weights are renormalized after reading when they already sum to 1 within 1e-9.
inline LhvModel model_from_json(const Json &j, const std::string &path = "") {
    const Shape shape = detail::validated(path + "/settings", [&] {
        return detail::shape_from_json(detail::member(j, "settings", path), path + "/settings");
    });
    const Json &list = detail::array(detail::member(j, "weights", path), path + "/weights");
    std::vector<double> w;
    double total = 0.0;
    for (std::size_t n = 0; n < list.size(); ++n) {
        w.push_back(detail::number(list[n], path + "/weights/" + std::to_string(n)));
        total += w.back();
    }
    if (std::abs(total - 1.0) <= 1e-9 && total > 0.0) {
        for (double &v : w) {
            v /= total;
        }
    }
    return detail::validated(path + "/weights", [&] { return LhvModel(shape, std::move(w)); });
}

// Datasets:
// {"assignment": [...], "shots_per_setting": N,
//  "tuples": [{"settings": [i,j,k], "counts": {"+++": n0, "++-": n1, ...}}, ...]}
// "shots_per_setting" may be omitted; every tuple must then have the same total.

inline Json to_json(const Dataset &data) {
    Json tuples = Json::array();
    const Shape shape = data.shape();
    for (std::size_t n = 0; n < shape.tuple_count(); ++n) {
        Json counts = Json::object();
        for (std::size_t o = 0; o < kOutcomes; ++o) {
            counts[outcome_label(o)] = data.counts()[n][o];
        }
        tuples.push_back({{"settings", detail::tuple_to_json(shape.tuple(n))}, {"counts", counts}});
    }
    return {{"assignment", to_json(data.assignment())},
            {"shots_per_setting", data.shots_per_setting()},
            {"tuples", tuples}};
}

inline Dataset dataset_from_json(const Json &j, const std::string &path = "") {
    SettingsAssignment assignment =
        assignment_from_json(detail::member(j, "assignment", path), path + "/assignment");
    const Shape shape = assignment.shape();
    const Json &tuples = detail::array(detail::member(j, "tuples", path), path + "/tuples");

    std::optional<std::uint64_t> shots;
    if (j.contains("shots_per_setting")) {
        shots = detail::count(j["shots_per_setting"], path + "/shots_per_setting");
        if (*shots == 0) {
            throw FormatError(path + "/shots_per_setting", "must be at least 1");
        }
    }

    std::vector<OutcomeCounts> counts(shape.tuple_count());
    std::vector<bool> seen(shape.tuple_count(), false);
    for (std::size_t n = 0; n < tuples.size(); ++n) {
        const std::string at = path + "/tuples/" + std::to_string(n);
        const SettingTuple t = detail::tuple_from_json(detail::member(tuples[n], "settings", at),
                                                       shape, at + "/settings");
        const std::size_t flat = shape.index(t);
        if (seen[flat]) {
            throw FormatError(at + "/settings", "duplicate settings tuple");
        }
        seen[flat] = true;
        const Json &c = detail::member(tuples[n], "counts", at);
        if (!c.is_object()) {
            throw FormatError(at + "/counts", "expected an object of outcome counts");
        }
        std::uint64_t total = 0;
        for (const auto &[label, value] : c.items()) {
            std::size_t o = kOutcomes;
            for (std::size_t k = 0; k < kOutcomes; ++k) {
                if (outcome_label(k) == label) {
                    o = k;
                }
            }
            if (o == kOutcomes) {
                throw FormatError(at + "/counts/" + label, "unknown outcome label");
            }
            counts[flat][o] = detail::count(value, at + "/counts/" + label);
            total += counts[flat][o];
        }
        if (!shots) {
            shots = total;
        }
        if (total != *shots) {
            throw FormatError(at + "/counts", "counts sum to " + std::to_string(total) +
                                                  ", expected " + std::to_string(*shots));
        }
    }
    for (std::size_t n = 0; n < seen.size(); ++n) {
        if (!seen[n]) {
            const auto t = shape.tuple(n);
            throw FormatError(path + "/tuples", "no entry for settings [" + std::to_string(t[0]) +
                                                    "," + std::to_string(t[1]) + "," +
                                                    std::to_string(t[2]) + "]");
        }
    }
    return detail::validated(path, [&] {
        return Dataset(std::move(assignment), shots.value_or(0), std::move(counts));
    });
}

inline Json to_json(const CorrelationTable &table) {
    Json rows = Json::array();
    for (std::size_t n = 0; n < table.size(); ++n) {
        rows.push_back({{"settings", detail::tuple_to_json(table.shape().tuple(n))},
                        {"E", round12(table[n])}});
    }
    return rows;
}

inline Json to_json(const EstimateTable &table) {
    Json rows = Json::array();
    for (std::size_t n = 0; n < table.size(); ++n) {
        rows.push_back({{"settings", detail::tuple_to_json(table.shape().tuple(n))},
                        {"E", round12(table[n].mean)},
                        {"stderr", round12(table[n].standard_error)},
                        {"shots", table[n].shots}});
    }
    return rows;
}

inline Json to_json(const ComparisonReport &report) {
    Json per_tuple = Json::array();
    for (std::size_t n = 0; n < report.observed.size(); ++n) {
        const double q = report.observed[n] - report.quantum_prediction[n];
        const double l = report.observed[n] - report.lhv_prediction[n];
        per_tuple.push_back({{"settings", detail::tuple_to_json(report.observed.shape().tuple(n))},
                             {"observed", round12(report.observed[n])},
                             {"quantum", round12(report.quantum_prediction[n])},
                             {"lhv", round12(report.lhv_prediction[n])},
                             {"quantum_sq_residual", round12(q * q)},
                             {"lhv_sq_residual", round12(l * l)}});
    }
    return {{"quantum_fit",
             {{"visibility", round12(report.quantum_fit.visibility)},
              {"visibility_stderr", round12(report.quantum_fit.standard_error)},
              {"residual", round12(report.quantum_fit.residual)}}},
            {"lhv_fit",
             {{"residual", round12(report.lhv_fit.residual)},
              {"iterations", report.lhv_fit.iterations_used},
              {"duality_gap", round12(report.lhv_fit.duality_gap)},
              {"bell_value", round12(report.lhv_bell_value)},
              {"model", to_json(report.lhv_fit.model)}}},
            {"mermin_estimate",
             {{"value", round12(report.mermin_estimate.value)},
              {"stderr", round12(report.mermin_estimate.standard_error)}}},
            {"verdict", to_string(report.verdict)},
            {"tie_tolerance", kVerdictTieTolerance},
            {"per_tuple", per_tuple}};
}

// Correlation CSV: header "i,j,k,E,stderr", one row per joint-setting tuple.

inline void write_correlation_csv(std::ostream &out, const EstimateTable &table) {
    out << "i,j,k,E,stderr\n";
    char buf[64];
    for (std::size_t n = 0; n < table.size(); ++n) {
        const auto t = table.shape().tuple(n);
        std::snprintf(buf, sizeof buf, "%.12g,%.12g", table[n].mean, table[n].standard_error);
        out << t[0] << ',' << t[1] << ',' << t[2] << ',' << buf << '\n';
    }
}

/// Reads a correlation CSV. Without an explicit shape it is inferred from the
/// largest index per column; every tuple must appear exactly once.
inline EstimateTable read_correlation_csv(std::istream &in,
                                          std::optional<Shape> shape = std::nullopt) {
    struct Row {
        SettingTuple t;
        double mean;
        double err;
    };
    std::vector<Row> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::string at = "line " + std::to_string(line_no);
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (!header_seen) {
            header_seen = true;
            if (cells != std::vector<std::string>{"i", "j", "k", "E", "stderr"}) {
                throw FormatError(at, "expected header i,j,k,E,stderr");
            }
            continue;
        }
        if (cells.size() != 5) {
            throw FormatError(at, "expected 5 columns");
        }
        Row row{};
        try {
            for (std::size_t p = 0; p < kParties; ++p) {
                std::size_t used = 0;
                const long v = std::stol(cells[p], &used);
                if (v < 0 || used != cells[p].size()) {
                    throw std::invalid_argument("bad index");
                }
                row.t[p] = static_cast<std::size_t>(v);
            }
            row.mean = std::stod(cells[3]);
            row.err = std::stod(cells[4]);
        } catch (const std::exception &) {
            throw FormatError(at, "malformed row \"" + line + "\"");
        }
        if (!std::isfinite(row.mean) || std::abs(row.mean) > 1.0 + kCorrelationSlack) {
            throw FormatError(at, "correlation outside [-1, 1]");
        }
        if (!std::isfinite(row.err) || row.err < 0.0) {
            throw FormatError(at, "standard error must be nonnegative");
        }
        rows.push_back(row);
    }
    if (rows.empty()) {
        throw FormatError("", "correlation CSV has no data rows");
    }
    if (!shape) {
        std::array<std::size_t, kParties> k{};
        for (const auto &r : rows) {
            for (std::size_t p = 0; p < kParties; ++p) {
                k[p] = std::max(k[p], r.t[p] + 1);
            }
        }
        shape = Shape(k[0], k[1], k[2]);
    }
    std::vector<CorrelationEstimate> entries(shape->tuple_count());
    std::vector<bool> seen(shape->tuple_count(), false);
    for (const auto &r : rows) {
        const std::size_t flat = detail::validated("", [&] { return shape->index(r.t); });
        if (seen[flat]) {
            throw FormatError("", "duplicate row for tuple " + std::to_string(r.t[0]) + "," +
                                      std::to_string(r.t[1]) + "," + std::to_string(r.t[2]));
        }
        seen[flat] = true;
        entries[flat] = {r.mean, r.err, 0};
    }
    for (std::size_t n = 0; n < seen.size(); ++n) {
        if (!seen[n]) {
            throw FormatError("", "missing row for tuple index " + std::to_string(n));
        }
    }
    return {*shape, std::move(entries)};
}

}  // namespace bellcheck
