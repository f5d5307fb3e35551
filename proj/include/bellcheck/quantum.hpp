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
 * Dense three-qubit density matrices, dichotomic spin observables and
 * correlation functions.
 *
 * Party 1 is the most significant bit of the 8-dimensional basis index, so
 * |abc> has index 4a + 2b + c.
 */

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "bellcheck/tables.hpp"

namespace bellcheck {

using Complex = std::complex<double>;
using DensityMatrix = Eigen::Matrix<Complex, 8, 8>;
using Operator2 = Eigen::Matrix2cd;

/// Tolerance for algebraic identities on dense 8x8 matrices.
inline constexpr double kAlgebraicTolerance = 1e-12;
/// Smallest eigenvalue accepted as positive semidefinite.
inline constexpr double kEigenvalueFloor = -1e-10;

/// Unit Bloch vector selecting the observable n.sigma for one qubit.
class MeasurementSetting {
  public:
    MeasurementSetting(double nx, double ny, double nz) : bloch_(nx, ny, nz) {
        if (!bloch_.allFinite() || std::abs(bloch_.norm() - 1.0) > kAlgebraicTolerance) {
            throw std::invalid_argument("measurement setting must be a unit Bloch vector (norm " +
                                        std::to_string(bloch_.norm()) + ")");
        }
    }

    /// Rescales any nonzero direction onto the unit sphere.
    static MeasurementSetting normalized(const Eigen::Vector3d &direction) {
        const double norm = direction.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw std::invalid_argument("cannot normalize a zero or non-finite direction");
        }
        const Eigen::Vector3d n = direction / norm;
        return {n.x(), n.y(), n.z()};
    }

    const Eigen::Vector3d &bloch() const { return bloch_; }
    double x() const { return bloch_.x(); }
    double y() const { return bloch_.y(); }
    double z() const { return bloch_.z(); }

    friend bool operator==(const MeasurementSetting &a, const MeasurementSetting &b) {
        return a.bloch_ == b.bloch_;
    }

  private:
    Eigen::Vector3d bloch_;
};

/// Weight of the entangled component in a signal/noise mixture.
class Visibility {
  public:
    explicit Visibility(double v) : v_(v) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("visibility must lie in [0, 1], got " + std::to_string(v));
        }
    }
    double value() const { return v_; }
    double complement() const { return 1.0 - v_; }

  private:
    double v_;
};

/// Validated three-qubit density matrix: Hermitian, unit trace, PSD.
class QuantumState {
  public:
    explicit QuantumState(const DensityMatrix &matrix) : rho_(matrix) { validate(); }

    const DensityMatrix &matrix() const { return rho_; }
    Complex operator()(int row, int col) const { return rho_(row, col); }

    double purity() const { return (rho_ * rho_).trace().real(); }

  private:
    void validate() const {
        if (!rho_.allFinite()) {
            throw std::invalid_argument("density matrix has non-finite entries");
        }
        const double hermiticity = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
        if (hermiticity > kAlgebraicTolerance) {
            throw std::invalid_argument("density matrix is not Hermitian (deviation " +
                                        std::to_string(hermiticity) + ")");
        }
        const double trace_error = std::abs(rho_.trace() - Complex(1.0, 0.0));
        if (trace_error > kAlgebraicTolerance) {
            throw std::invalid_argument("density matrix trace differs from 1 by " +
                                        std::to_string(trace_error));
        }
        const Eigen::SelfAdjointEigenSolver<DensityMatrix> solver(rho_, Eigen::EigenvaluesOnly);
        const double min_eigenvalue = solver.eigenvalues().minCoeff();
        if (min_eigenvalue < kEigenvalueFloor) {
            throw std::invalid_argument("density matrix has negative eigenvalue " +
                                        std::to_string(min_eigenvalue));
        }
    }

    DensityMatrix rho_;
};

/// Projector onto (|000> + |111>)/sqrt(2).
inline QuantumState ghz_state() {
    DensityMatrix rho = DensityMatrix::Zero();
    rho(0, 0) = rho(0, 7) = rho(7, 0) = rho(7, 7) = 0.5;
    return QuantumState(rho);
}

/// Maximally mixed state 1/8.
inline QuantumState white_noise_state() {
    return QuantumState(DensityMatrix::Identity() / 8.0);
}

/// v * signal + (1 - v) * noise.
inline QuantumState mix(const QuantumState &signal, const QuantumState &noise, Visibility v) {
    return QuantumState(v.value() * signal.matrix() + v.complement() * noise.matrix());
}

namespace pauli {
inline Operator2 identity() { return Operator2::Identity(); }
inline Operator2 x() { return (Operator2() << 0, 1, 1, 0).finished(); }
inline Operator2 y() {
    return (Operator2() << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0)).finished();
}
inline Operator2 z() { return (Operator2() << 1, 0, 0, -1).finished(); }
}  // namespace pauli

/// nx sigma_x + ny sigma_y + nz sigma_z; eigenvalues +1 and -1.
inline Operator2 observable(const MeasurementSetting &s) {
    return s.x() * pauli::x() + s.y() * pauli::y() + s.z() * pauli::z();
}

/// A (x) B (x) C with party 1 on the most significant bit.
inline DensityMatrix kron3(const Operator2 &a, const Operator2 &b, const Operator2 &c) {
    DensityMatrix out;
    for (int r = 0; r < 8; ++r) {
        for (int col = 0; col < 8; ++col) {
            out(r, col) = a(r >> 2, col >> 2) * b((r >> 1) & 1, (col >> 1) & 1) * c(r & 1, col & 1);
        }
    }
    return out;
}

/// Tr[rho (O1 (x) O2 (x) O3)] for arbitrary single-qubit operators.
///
/// The result is complex in general; callers with Hermitian operators take
/// the real part.
inline Complex expectation(const QuantumState &state, const Operator2 &o1, const Operator2 &o2,
                           const Operator2 &o3) {
    // Tr(AB) = sum_ij A_ij B_ji
    return state.matrix().cwiseProduct(kron3(o1, o2, o3).transpose()).sum();
}

/// Three-party correlation function E(s1, s2, s3).
inline double correlation(const QuantumState &state, const MeasurementSetting &s1,
                          const MeasurementSetting &s2, const MeasurementSetting &s3) {
    return expectation(state, observable(s1), observable(s2), observable(s3)).real();
}

/// Probabilities of the eight joint outcomes, indexed as in outcome_sign().
inline std::array<double, kOutcomes> outcome_distribution(const QuantumState &state,
                                                          const MeasurementSetting &s1,
                                                          const MeasurementSetting &s2,
                                                          const MeasurementSetting &s3) {
    const std::array<Operator2, kParties> obs{observable(s1), observable(s2), observable(s3)};
    std::array<std::array<Operator2, 2>, kParties> projectors;
    for (std::size_t p = 0; p < kParties; ++p) {
        projectors[p][0] = (pauli::identity() + obs[p]) / 2.0;
        projectors[p][1] = (pauli::identity() - obs[p]) / 2.0;
    }
    std::array<double, kOutcomes> probs{};
    for (std::size_t o = 0; o < kOutcomes; ++o) {
        probs[o] = expectation(state, projectors[0][(o >> 2) & 1], projectors[1][(o >> 1) & 1],
                               projectors[2][o & 1])
                       .real();
    }
    return probs;
}

}  // namespace bellcheck
