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

#ifndef QAASIM_EXPERIMENTS_HPP
#define QAASIM_EXPERIMENTS_HPP

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qaasim/ec3.hpp"
#include "qaasim/errors.hpp"
#include "qaasim/evolve.hpp"
#include "qaasim/hamiltonian.hpp"
#include "qaasim/noise.hpp"
#include "qaasim/parallel.hpp"
#include "qaasim/rng.hpp"

namespace qaasim {

// Noise/integration knobs shared by every experiment family; the Hurst
// exponent itself is a grid dimension, so it lives outside.
struct RunSettings {
    double dt = 0.01;
    double epsilon = 1e-3;
    PhiMode phi_mode = PhiMode::per_step_fresh;
};

// SP = F_noisy / F_0.
inline double speedup(double mean_noisy, double baseline) {
    if (!(baseline > 0.0)) {
        throw UndefinedSpeedupError("speedup is undefined for baseline fidelity " +
                                    std::to_string(baseline));
    }
    return mean_noisy / baseline;
}

inline std::vector<double> probability_distribution(const StateVector& state) {
    if (state.size() == 0) {
        throw std::invalid_argument("cannot take probabilities of an empty state");
    }
    std::vector<double> probs(static_cast<std::size_t>(state.size()));
    for (Eigen::Index i = 0; i < state.size(); ++i) {
        probs[static_cast<std::size_t>(i)] = std::norm(state(i));
    }
    return probs;
}

// Per-realization substream. Keyed on the T and H values themselves (not on
// grid positions), so any reordering or subsetting of a sweep grid leaves
// every cell's realizations untouched.
inline std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t instance_id, double total_time,
                               double hurst, std::uint64_t realization) {
    return substream(seed, instance_id, std::bit_cast<std::uint64_t>(total_time),
                     std::bit_cast<std::uint64_t>(hurst), realization);
}

namespace detail {

struct CellStats {
    double mean = 0.0;
    double std_error = 0.0;
};

// R noisy realizations of one (instance, T, H) cell against a shared
// propagator table. Realizations fan out over the work pool; each writes its
// own slot, so the aggregate is independent of the thread count.
inline CellStats run_cell(const PropagatorTable& table, std::int64_t ground_index, double hurst,
                          const RunSettings& settings, std::uint64_t seed,
                          std::uint64_t instance_id, int realizations, int threads) {
    const NoiseParams params{hurst, settings.epsilon, settings.phi_mode};
    params.validate();
    const StepGrid& grid = table.grid();
    const PhiKernel kernel = PhiKernel::build(grid, params);

    std::vector<double> fidelities(static_cast<std::size_t>(realizations), 0.0);
    parallel_for(realizations, threads, [&](std::int64_t r) {
        EvolutionConfig cfg;
        cfg.total_time = grid.total_time;
        cfg.dt = grid.dt;
        cfg.noise = params;
        cfg.seed = cell_seed(seed, instance_id, grid.total_time, hurst,
                             static_cast<std::uint64_t>(r));
        NoiseSource source = make_model_noise_source(params, cfg.seed, kernel, grid.dt);
        fidelities[static_cast<std::size_t>(r)] =
            run_with_table(table, ground_index, cfg, &source).fidelity;
    });

    CellStats stats;
    for (double f : fidelities) {
        stats.mean += f;
    }
    stats.mean /= realizations;
    if (realizations > 1) {
        double ss = 0.0;
        for (double f : fidelities) {
            ss += (f - stats.mean) * (f - stats.mean);
        }
        stats.std_error = std::sqrt(ss / (realizations - 1)) / std::sqrt(double(realizations));
    }
    return stats;
}

inline double noiseless_fidelity(const PropagatorTable& table, std::int64_t ground_index) {
    EvolutionConfig cfg;
    cfg.total_time = table.grid().total_time;
    cfg.dt = table.grid().dt;
    return run_with_table(table, ground_index, cfg, nullptr).fidelity;
}

inline void check_common_arguments(const std::vector<double>& h_grid, int realizations) {
    if (h_grid.empty()) {
        throw std::invalid_argument("the Hurst grid must be nonempty");
    }
    if (realizations < 1) {
        throw std::invalid_argument("realizations must be at least 1");
    }
}

}  // namespace detail

struct SweepResult {
    std::vector<double> t_grid;
    std::vector<double> h_grid;
    Eigen::MatrixXd mean_fidelity;           // T rows x H columns
    Eigen::MatrixXd std_error;               // same shape
    std::vector<double> baseline_fidelity;   // noiseless F_0 per T
    Eigen::MatrixXd speedup;                 // mean_fidelity / baseline per row
    int realizations = 0;
};

// For each (T, H): R noisy runs averaged into a mean fidelity with its
// standard error, one noiseless run per T as the baseline, and the speedup
// ratio. Cells are deterministic functions of (seed, T, H, realization).
inline SweepResult sweep(const Ec3Instance& instance, const std::vector<double>& t_grid,
                         const std::vector<double>& h_grid, int realizations,
                         const RunSettings& settings, std::uint64_t seed, int threads = 0) {
    if (t_grid.empty()) {
        throw std::invalid_argument("the T grid must be nonempty");
    }
    detail::check_common_arguments(h_grid, realizations);
    check_instance(instance);

    const Eigen::MatrixXd hi = initial_hamiltonian_real(instance.n);
    const DiagonalHamiltonian hf = build_final_hamiltonian(instance);
    const std::int64_t ground_index = ground_state_index(hf);

    SweepResult out;
    out.t_grid = t_grid;
    out.h_grid = h_grid;
    out.realizations = realizations;
    const Eigen::Index rows = static_cast<Eigen::Index>(t_grid.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(h_grid.size());
    out.mean_fidelity.setZero(rows, cols);
    out.std_error.setZero(rows, cols);
    out.speedup.setZero(rows, cols);
    out.baseline_fidelity.assign(t_grid.size(), 0.0);

    for (std::size_t it = 0; it < t_grid.size(); ++it) {
        const StepGrid grid = make_step_grid(t_grid[it], settings.dt);
        const PropagatorTable table(hi, hf, grid);
        out.baseline_fidelity[it] = detail::noiseless_fidelity(table, ground_index);
        for (std::size_t ih = 0; ih < h_grid.size(); ++ih) {
            detail::CellStats cell = detail::run_cell(table, ground_index, h_grid[ih], settings,
                                                      seed, 0, realizations, threads);
            const Eigen::Index r = static_cast<Eigen::Index>(it);
            const Eigen::Index c = static_cast<Eigen::Index>(ih);
            out.mean_fidelity(r, c) = cell.mean;
            out.std_error(r, c) = cell.std_error;
            out.speedup(r, c) = speedup(cell.mean, out.baseline_fidelity[it]);
        }
    }
    return out;
}

inline constexpr double kHistogramBinWidth = 0.02;
inline constexpr int kHistogramBins = 50;

struct EnsembleStats {
    std::vector<double> h_grid;
    double total_time = 0.0;
    int realizations = 0;
    Eigen::MatrixXd per_instance_mean;          // instance rows x H columns
    std::vector<std::array<int, kHistogramBins>> histogram;  // per H, bins over [0,1]
    std::vector<double> mean;                   // over instances, per H
    std::vector<double> stddev;                 // sample std over instances, per H
};

// Distribution of per-instance mean fidelities over an instance set, per
// Hurst value, with a fixed-bin histogram over [0, 1].
inline EnsembleStats ensemble(const std::vector<Ec3Instance>& instances,
                              const std::vector<double>& h_grid, double total_time,
                              int realizations, const RunSettings& settings, std::uint64_t seed,
                              int threads = 0) {
    if (instances.empty()) {
        throw std::invalid_argument("the instance list must be nonempty");
    }
    detail::check_common_arguments(h_grid, realizations);
    for (const Ec3Instance& instance : instances) {
        check_instance(instance);
        if (instance.n != instances.front().n) {
            throw std::invalid_argument("all ensemble instances must share one qubit count");
        }
    }

    EnsembleStats out;
    out.h_grid = h_grid;
    out.total_time = total_time;
    out.realizations = realizations;
    out.per_instance_mean.setZero(static_cast<Eigen::Index>(instances.size()),
                                  static_cast<Eigen::Index>(h_grid.size()));

    for (std::size_t i = 0; i < instances.size(); ++i) {
        const Eigen::MatrixXd hi = initial_hamiltonian_real(instances[i].n);
        const DiagonalHamiltonian hf = build_final_hamiltonian(instances[i]);
        const std::int64_t ground_index = ground_state_index(hf);
        const StepGrid grid = make_step_grid(total_time, settings.dt);
        const PropagatorTable table(hi, hf, grid);
        for (std::size_t ih = 0; ih < h_grid.size(); ++ih) {
            detail::CellStats cell =
                detail::run_cell(table, ground_index, h_grid[ih], settings, seed,
                                 static_cast<std::uint64_t>(i), realizations, threads);
            out.per_instance_mean(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ih)) =
                cell.mean;
        }
    }

    out.histogram.assign(h_grid.size(), {});
    out.mean.assign(h_grid.size(), 0.0);
    out.stddev.assign(h_grid.size(), 0.0);
    const auto count = static_cast<double>(instances.size());
    for (std::size_t ih = 0; ih < h_grid.size(); ++ih) {
        const Eigen::Index c = static_cast<Eigen::Index>(ih);
        for (Eigen::Index i = 0; i < out.per_instance_mean.rows(); ++i) {
            const double f = out.per_instance_mean(i, c);
            int bin = static_cast<int>(f / kHistogramBinWidth);
            bin = std::min(std::max(bin, 0), kHistogramBins - 1);
            ++out.histogram[ih][static_cast<std::size_t>(bin)];
            out.mean[ih] += f;
        }
        out.mean[ih] /= count;
        if (instances.size() > 1) {
            double ss = 0.0;
            for (Eigen::Index i = 0; i < out.per_instance_mean.rows(); ++i) {
                const double d = out.per_instance_mean(i, c) - out.mean[ih];
                ss += d * d;
            }
            out.stddev[ih] = std::sqrt(ss / (count - 1.0));
        }
    }
    return out;
}

struct ScalingResult {
    std::vector<int> n_grid;
    std::vector<double> h_grid;
    double total_time = 0.0;
    int realizations = 0;
    int instances_per_n = 0;
    Eigen::MatrixXd mean_fidelity;   // n rows x H columns, mean over instances
    Eigen::MatrixXd std_fidelity;    // sample std over instances
    Eigen::MatrixXd mean_speedup;
    Eigen::MatrixXd std_speedup;
};

// Fresh random instances per qubit count; per-instance mean fidelity and
// speedup, aggregated into means and standard deviations across instances.
inline ScalingResult scaling_study(const std::vector<int>& n_grid, int instances_per_n,
                                   const std::vector<double>& h_grid, double total_time,
                                   int realizations, const RunSettings& settings,
                                   std::uint64_t seed, int threads = 0,
                                   const GenerateLimits& limits = GenerateLimits{}) {
    if (n_grid.empty()) {
        throw std::invalid_argument("the n grid must be nonempty");
    }
    if (instances_per_n < 1) {
        throw std::invalid_argument("instances_per_n must be at least 1");
    }
    detail::check_common_arguments(h_grid, realizations);

    ScalingResult out;
    out.n_grid = n_grid;
    out.h_grid = h_grid;
    out.total_time = total_time;
    out.realizations = realizations;
    out.instances_per_n = instances_per_n;
    const Eigen::Index rows = static_cast<Eigen::Index>(n_grid.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(h_grid.size());
    out.mean_fidelity.setZero(rows, cols);
    out.std_fidelity.setZero(rows, cols);
    out.mean_speedup.setZero(rows, cols);
    out.std_speedup.setZero(rows, cols);

    for (std::size_t in = 0; in < n_grid.size(); ++in) {
        const int n = n_grid[static_cast<std::size_t>(in)];
        Eigen::MatrixXd inst_f(instances_per_n, cols);
        Eigen::MatrixXd inst_sp(instances_per_n, cols);
        for (int k = 0; k < instances_per_n; ++k) {
            // Instance identity is (n, k), independent of grid layout.
            const std::uint64_t instance_id =
                (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(k);
            const Ec3Instance instance =
                generate_instance(n, substream(seed, instance_id, Stream::instance_gen), limits);
            const Eigen::MatrixXd hi = initial_hamiltonian_real(n);
            const DiagonalHamiltonian hf = build_final_hamiltonian(instance);
            const std::int64_t ground_index = ground_state_index(hf);
            const StepGrid grid = make_step_grid(total_time, settings.dt);
            const PropagatorTable table(hi, hf, grid);
            const double baseline = detail::noiseless_fidelity(table, ground_index);
            for (Eigen::Index c = 0; c < cols; ++c) {
                detail::CellStats cell = detail::run_cell(
                    table, ground_index, h_grid[static_cast<std::size_t>(c)], settings, seed,
                    instance_id, realizations, threads);
                inst_f(k, c) = cell.mean;
                inst_sp(k, c) = speedup(cell.mean, baseline);
            }
        }
        const Eigen::Index r = static_cast<Eigen::Index>(in);
        for (Eigen::Index c = 0; c < cols; ++c) {
            out.mean_fidelity(r, c) = inst_f.col(c).mean();
            out.mean_speedup(r, c) = inst_sp.col(c).mean();
            if (instances_per_n > 1) {
                const double denom = instances_per_n - 1.0;
                out.std_fidelity(r, c) = std::sqrt(
                    (inst_f.col(c).array() - out.mean_fidelity(r, c)).square().sum() / denom);
                out.std_speedup(r, c) = std::sqrt(
                    (inst_sp.col(c).array() - out.mean_speedup(r, c)).square().sum() / denom);
            }
        }
    }
    return out;
}

struct BlochTrajectory {
    std::vector<double> times;
    std::vector<std::array<double, 3>> points;
};

// (x, y, z) = (2 Re(a* b), 2 Im(a* b), |a|^2 - |b|^2) for a state (a, b).
inline std::array<double, 3> bloch_point(const StateVector& state) {
    if (state.size() != 2) {
        throw std::invalid_argument("bloch requires a single-qubit system");
    }
    const std::complex<double> cross = std::conj(state(0)) * state(1);
    return {2.0 * cross.real(), 2.0 * cross.imag(), std::norm(state(0)) - std::norm(state(1))};
}

// Full per-step Bloch-sphere trace of a single-qubit schedule, noiseless or
// noisy depending on cfg.noise.
inline BlochTrajectory bloch_trajectory(const DiagonalHamiltonian& hf, EvolutionConfig cfg) {
    if (hf.n != 1 || hf.diag.size() != 2) {
        throw std::invalid_argument("bloch requires a single-qubit system");
    }
    cfg.record_trajectory = true;
    const Eigen::MatrixXd hi = initial_hamiltonian_real(1);
    const RunResult run = cfg.noise.has_value() ? run_noisy(hi, hf, cfg)
                                                : run_standard(hi, hf, cfg);
    BlochTrajectory out;
    out.times = run.trajectory->times;
    out.points.reserve(run.trajectory->states.size());
    for (const StateVector& state : run.trajectory->states) {
        out.points.push_back(bloch_point(state));
    }
    return out;
}

}  // namespace qaasim

#endif
