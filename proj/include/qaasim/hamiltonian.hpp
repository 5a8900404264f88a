// Copyright 2026 The qaasim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QAASIM_HAMILTONIAN_HPP
#define QAASIM_HAMILTONIAN_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qaasim/ec3.hpp"
#include "qaasim/errors.hpp"

namespace qaasim {

// Encoding chain: EC3 objective f(x) -> QUBO g(x) = f(x) - m (m = clause
// count) -> Ising diagonal via x_i = (1 - z_i)/2 -> dense problem
// Hamiltonian. Spin convention: bit 0 maps to sigma^z = +1. The driver is
// H_I = -sum_i sigma_i^x, whose ground state is the uniform superposition.

using HermitianOperator = Eigen::MatrixXcd;

inline constexpr int kMaxQubits = 12;
inline constexpr double kDegeneracyTolerance = 1e-12;

inline void check_qubit_count(int n) {
    if (n < 1) {
        throw std::invalid_argument("qubit count must be >= 1, got " + std::to_string(n));
    }
    if (n > kMaxQubits) {
        throw ResourceLimitError(
            "dense simulation of n = " + std::to_string(n) + " qubits exceeds the limit of " +
            std::to_string(kMaxQubits));
    }
}

// Upper-triangular QUBO for g(x) = sum_i q_ii x_i + sum_{i<j} q_ij x_i x_j.
// q is 0-based; entry (i-1, j-1) corresponds to bits (i, j).
struct QuboMatrix {
    int n = 0;
    Eigen::MatrixXd q;
};

// Diagonal q_ii = -B_i where B_i counts clauses containing bit i; off-diagonal
// q_ij = 2 C_ij where C_ij counts clauses containing both. The factor 2 comes
// from expanding (1 - x_i - x_j - x_k)^2 over binary variables, and makes
// g(x) + m = f(x) exact.
inline QuboMatrix build_qubo(const Ec3Instance& inst) {
    check_instance(inst);
    QuboMatrix qubo;
    qubo.n = inst.n;
    qubo.q = Eigen::MatrixXd::Zero(inst.n, inst.n);
    for (const Clause& cl : inst.clauses) {
        std::array<int, 3> s = cl.sorted();
        for (int v : s) {
            qubo.q(v - 1, v - 1) -= 1.0;
        }
        qubo.q(s[0] - 1, s[1] - 1) += 2.0;
        qubo.q(s[0] - 1, s[2] - 1) += 2.0;
        qubo.q(s[1] - 1, s[2] - 1) += 2.0;
    }
    return qubo;
}

inline double qubo_value(const QuboMatrix& qubo, const Assignment& x) {
    if (static_cast<int>(x.size()) != qubo.n) {
        throw std::invalid_argument("assignment length does not match QUBO size");
    }
    double g = 0.0;
    for (int i = 0; i < qubo.n; ++i) {
        if (!x[static_cast<std::size_t>(i)]) {
            continue;
        }
        g += qubo.q(i, i);
        for (int j = i + 1; j < qubo.n; ++j) {
            if (x[static_cast<std::size_t>(j)]) {
                g += qubo.q(i, j);
            }
        }
    }
    return g;
}

// h_i z_i + J_ij z_i z_j + constant, with z_i = 1 - 2 x_i.
struct IsingCoefficients {
    int n = 0;
    Eigen::VectorXd h;
    Eigen::MatrixXd j;  // upper triangular
    double constant = 0.0;
};

inline IsingCoefficients qubo_to_ising(const QuboMatrix& qubo) {
    IsingCoefficients ising;
    ising.n = qubo.n;
    ising.h = Eigen::VectorXd::Zero(qubo.n);
    ising.j = Eigen::MatrixXd::Zero(qubo.n, qubo.n);
    ising.constant = 0.0;
    for (int i = 0; i < qubo.n; ++i) {
        ising.h(i) -= qubo.q(i, i) / 2.0;
        ising.constant += qubo.q(i, i) / 2.0;
        for (int j = i + 1; j < qubo.n; ++j) {
            double qij = qubo.q(i, j);
            if (qij == 0.0) {
                continue;
            }
            ising.j(i, j) = qij / 4.0;
            ising.h(i) -= qij / 4.0;
            ising.h(j) -= qij / 4.0;
            ising.constant += qij / 4.0;
        }
    }
    return ising;
}

inline double ising_value(const IsingCoefficients& ising, const Assignment& x) {
    if (static_cast<int>(x.size()) != ising.n) {
        throw std::invalid_argument("assignment length does not match Ising size");
    }
    double e = ising.constant;
    for (int i = 0; i < ising.n; ++i) {
        double zi = x[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
        e += ising.h(i) * zi;
        for (int j = i + 1; j < ising.n; ++j) {
            double zj = x[static_cast<std::size_t>(j)] ? -1.0 : 1.0;
            e += ising.j(i, j) * zi * zj;
        }
    }
    return e;
}

struct DiagonalHamiltonian {
    int n = 0;
    Eigen::VectorXd diag;  // length 2^n, basis index sum_i x_i 2^(i-1)
};

inline DiagonalHamiltonian diagonal_from_ising(const IsingCoefficients& ising,
                                               bool include_constant = true) {
    check_qubit_count(ising.n);
    DiagonalHamiltonian hf;
    hf.n = ising.n;
    const std::int64_t dim = std::int64_t{1} << ising.n;
    hf.diag = Eigen::VectorXd::Zero(dim);
    for (std::int64_t idx = 0; idx < dim; ++idx) {
        double e = include_constant ? ising.constant : 0.0;
        for (int i = 0; i < ising.n; ++i) {
            double zi = ((idx >> i) & 1) ? -1.0 : 1.0;
            e += ising.h(i) * zi;
            for (int j = i + 1; j < ising.n; ++j) {
                if (ising.j(i, j) == 0.0) {
                    continue;
                }
                double zj = ((idx >> j) & 1) ? -1.0 : 1.0;
                e += ising.j(i, j) * zi * zj;
            }
        }
        hf.diag(idx) = e;
    }
    return hf;
}

// With the constant retained, diag[index(x)] = f(x) - m for every assignment.
inline DiagonalHamiltonian build_final_hamiltonian(const Ec3Instance& inst,
                                                   bool include_constant = true) {
    check_qubit_count(inst.n);
    return diagonal_from_ising(qubo_to_ising(build_qubo(inst)), include_constant);
}

// H_I = -sum_i sigma_i^x: entry (r, c) is -1 when r and c differ in exactly
// one bit.
inline Eigen::MatrixXd initial_hamiltonian_real(int n) {
    check_qubit_count(n);
    const std::int64_t dim = std::int64_t{1} << n;
    Eigen::MatrixXd hi = Eigen::MatrixXd::Zero(dim, dim);
    for (std::int64_t r = 0; r < dim; ++r) {
        for (int b = 0; b < n; ++b) {
            hi(r, r ^ (std::int64_t{1} << b)) = -1.0;
        }
    }
    return hi;
}

inline HermitianOperator build_initial_hamiltonian(int n) {
    return initial_hamiltonian_real(n).cast<std::complex<double>>();
}

inline void check_schedule_parameter(double s) {
    if (!(s >= 0.0 && s <= 1.0)) {
        throw std::invalid_argument("schedule parameter s must lie in [0, 1], got " +
                                    std::to_string(s));
    }
}

inline Eigen::MatrixXd interpolate_real(const Eigen::MatrixXd& hi, const DiagonalHamiltonian& hf,
                                        double s) {
    check_schedule_parameter(s);
    if (hi.rows() != hf.diag.size() || hi.cols() != hf.diag.size()) {
        throw std::invalid_argument("initial and final Hamiltonian dimensions differ");
    }
    Eigen::MatrixXd h = (1.0 - s) * hi;
    h.diagonal() += s * hf.diag;
    return h;
}

// H(s) = (1 - s) H_I + s H_F.
inline HermitianOperator interpolate(const HermitianOperator& hi, const DiagonalHamiltonian& hf,
                                     double s) {
    check_schedule_parameter(s);
    if (hi.rows() != hf.diag.size() || hi.cols() != hf.diag.size()) {
        throw std::invalid_argument("initial and final Hamiltonian dimensions differ");
    }
    HermitianOperator h = (1.0 - s) * hi;
    h.diagonal() += (s * hf.diag).cast<std::complex<double>>();
    return h;
}

// Index of the strictly smallest diagonal entry. A tie within 1e-12 means the
// encoded problem has no unique answer to read out, which is an error here.
inline std::int64_t ground_state_index(const DiagonalHamiltonian& hf) {
    if (hf.diag.size() == 0) {
        throw std::invalid_argument("empty diagonal");
    }
    std::int64_t best = 0;
    for (std::int64_t i = 1; i < hf.diag.size(); ++i) {
        if (hf.diag(i) < hf.diag(best)) {
            best = i;
        }
    }
    for (std::int64_t i = 0; i < hf.diag.size(); ++i) {
        if (i != best && hf.diag(i) - hf.diag(best) <= kDegeneracyTolerance) {
            throw DegenerateGroundState(
                "final Hamiltonian ground state is degenerate: entries " + std::to_string(best) +
                " and " + std::to_string(i) + " are within 1e-12");
        }
    }
    return best;
}

struct SpectrumScan {
    std::vector<double> s_grid;
    Eigen::MatrixXd energies;  // rows follow s_grid, cols are the k lowest levels
    double gap_min = 0.0;
    double s_at_min = 0.0;
};

// Scans the k lowest eigenvalues of H(s) over a uniform s grid and locates
// the minimum E1 - E0 gap. k is clamped to the matrix dimension.
inline SpectrumScan spectrum_scan(const Eigen::MatrixXd& hi, const DiagonalHamiltonian& hf,
                                  double ds = 0.001, int k = 3) {
    if (!(ds > 0.0 && ds <= 0.5)) {
        throw std::invalid_argument("grid spacing ds must lie in (0, 0.5], got " +
                                    std::to_string(ds));
    }
    if (k < 2) {
        throw std::invalid_argument("need at least 2 levels to define a gap");
    }
    const std::int64_t dim = hf.diag.size();
    if (hi.rows() != dim || hi.cols() != dim) {
        throw std::invalid_argument("initial and final Hamiltonian dimensions differ");
    }
    k = std::min<std::int64_t>(k, dim);
    const int points = static_cast<int>(std::llround(1.0 / ds)) + 1;
    SpectrumScan scan;
    scan.s_grid.resize(points);
    scan.energies.resize(points, k);
    scan.gap_min = std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    for (int p = 0; p < points; ++p) {
        double s = p == points - 1 ? 1.0 : p * ds;
        scan.s_grid[p] = s;
        solver.compute(interpolate_real(hi, hf, s), Eigen::EigenvaluesOnly);
        for (int level = 0; level < k; ++level) {
            scan.energies(p, level) = solver.eigenvalues()(level);
        }
        double gap = scan.energies(p, 1) - scan.energies(p, 0);
        if (gap < scan.gap_min) {
            scan.gap_min = gap;
            scan.s_at_min = s;
        }
    }
    return scan;
}

}  // namespace qaasim

#endif
