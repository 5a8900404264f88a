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

#ifndef QAASIM_EVOLVE_HPP
#define QAASIM_EVOLVE_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qaasim/hamiltonian.hpp"
#include "qaasim/noise.hpp"
#include "qaasim/rng.hpp"

namespace qaasim {

// Schedule H(t) = (1 - t/T) H_I + (t/T) H_F, started in the uniform
// superposition. Each step applies the explicit one-step solution of the
// noisy Schrodinger equation with H frozen at the left endpoint:
//
//   U_i = exp(-i H(t_i) theta_i),  theta_i = (1 + phi_i) dt + eps^alpha dW_i
//
// The Ito drift -1/2 eps^(2 alpha) H^2 of the underlying SDE is absorbed by
// this explicit solution; the Euler-Maruyama stepper below keeps it and
// serves as the independent cross-check. Noiseless evolution is theta = dt.

using StateVector = Eigen::VectorXcd;

struct EvolutionConfig {
    double total_time = 1.0;
    double dt = 0.01;
    std::optional<NoiseParams> noise;
    std::uint64_t seed = 0;
    bool record_trajectory = false;
};

// Uniform step grid covering [0, T]; if T/dt is not integral the final step
// is shortened so the last step lands exactly at T.
struct StepGrid {
    double total_time = 0.0;
    double dt = 0.0;
    int steps = 0;
    double last_width = 0.0;

    double time_at(int i) const { return i * dt; }
    double width_at(int i) const { return i + 1 == steps ? last_width : dt; }
};

inline StepGrid make_step_grid(double total_time, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("dt must be positive, got " + std::to_string(dt));
    }
    if (!(total_time >= dt)) {
        throw std::invalid_argument("total_time must be at least dt");
    }
    StepGrid grid;
    grid.total_time = total_time;
    grid.dt = dt;
    const double ratio = total_time / dt;
    const long long nearest = std::llround(ratio);
    if (nearest >= 1 && std::abs(ratio - static_cast<double>(nearest)) <=
                            1e-9 * std::max(1.0, ratio)) {
        grid.steps = static_cast<int>(nearest);
    } else {
        grid.steps = static_cast<int>(std::ceil(ratio));
    }
    grid.last_width = total_time - (grid.steps - 1) * dt;
    return grid;
}

inline StateVector initial_state_of_dim(std::int64_t dim) {
    return StateVector::Constant(dim, std::complex<double>(1.0 / std::sqrt(double(dim)), 0.0));
}

// Uniform superposition, the ground state of H_I.
inline StateVector initial_state(int n) {
    check_qubit_count(n);
    return initial_state_of_dim(std::int64_t{1} << n);
}

inline double fidelity(const StateVector& state, std::int64_t target_index) {
    if (target_index < 0 || target_index >= state.size()) {
        throw std::invalid_argument("target index " + std::to_string(target_index) +
                                    " outside the state space");
    }
    return std::norm(state(target_index));
}

// U = exp(-i theta h) synthesized from the eigendecomposition, so it is
// unitary to machine precision for any theta.
inline Eigen::MatrixXcd unitary_of_hermitian(const HermitianOperator& h, double theta) {
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw std::invalid_argument("operator must be square");
    }
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("operator is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    Eigen::VectorXcd phase(h.rows());
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
        double ang = theta * solver.eigenvalues()(r);
        phase(r) = std::complex<double>(std::cos(ang), -std::sin(ang));
    }
    return solver.eigenvectors() * phase.asDiagonal() * solver.eigenvectors().adjoint();
}

inline double noisy_theta(double width, double phi, double dw, double eps_alpha) {
    return (1.0 + phi) * width + eps_alpha * dw;
}

// dt doubles as a plain evolution angle here: a noisy step can produce a
// negative effective theta, and exp(-i theta h) is well defined either way.
inline void step_noiseless(StateVector& state, const HermitianOperator& h, double dt) {
    state = unitary_of_hermitian(h, dt) * state;
}

inline void step_noisy(StateVector& state, const HermitianOperator& h, double dt, double phi,
                       double dw, const NoiseParams& params) {
    params.validate();
    double eps_alpha = std::pow(params.epsilon, params.alpha());
    state = unitary_of_hermitian(h, noisy_theta(dt, phi, dw, eps_alpha)) * state;
}

// First-order Euler-Maruyama step of
//   d psi = (-i H - 1/2 eps^(2 alpha) H^2 - i phi H) psi dt - i eps^alpha H psi dW
// renormalized afterwards; used only to cross-validate the explicit stepper.
inline void euler_maruyama_step(StateVector& state, const HermitianOperator& h, double dt,
                                double phi, double dw, const NoiseParams& params) {
    params.validate();
    if (!(dt > 0.0)) {
        throw std::invalid_argument("dt must be positive");
    }
    const std::complex<double> minus_i(0.0, -1.0);
    double eps_alpha = std::pow(params.epsilon, params.alpha());
    StateVector hp = h * state;
    StateVector hhp = h * hp;
    state += minus_i * ((1.0 + phi) * dt) * hp;
    state += (-0.5 * eps_alpha * eps_alpha * dt) * hhp;
    state += minus_i * (eps_alpha * dw) * hp;
    state.normalize();
}

inline constexpr std::int64_t kTableMemoryLimit = std::int64_t{3} << 30;

inline std::int64_t propagator_table_bytes(int steps, std::int64_t dim) {
    return std::int64_t(steps) * dim * dim * 8;
}

// Rotates psi by exp(-i theta H) given the eigenpairs H = V diag(lam) V^T.
// The complex state is reinterpreted as a dim x 2 real matrix (std::complex
// guarantees the {re, im} layout), so the change of basis runs as real GEMMs:
// 8 dim^2 flops per step instead of a complex matrix-vector product.
inline void apply_eigen_rotation(const Eigen::MatrixXd& v, const Eigen::VectorXd& lam,
                                 double theta, StateVector& psi, StateVector& scratch) {
    using Map2 = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>>;
    const std::int64_t dim = v.rows();
    Map2 pm(reinterpret_cast<double*>(psi.data()), dim, 2);
    Map2 sm(reinterpret_cast<double*>(scratch.data()), dim, 2);
    sm.noalias() = v.transpose() * pm;
    for (std::int64_t r = 0; r < dim; ++r) {
        double ang = theta * lam(r);
        double c = std::cos(ang);
        double s = std::sin(ang);
        double re = sm(r, 0);
        double im = sm(r, 1);
        sm(r, 0) = c * re + s * im;
        sm(r, 1) = c * im - s * re;
    }
    pm.noalias() = v * sm;
}

// Eigendecompositions of H(t_i) for every step of a schedule, shared by all
// noise realizations of the same (instance, T, dt) cell. apply() rotates a
// state by exp(-i theta H(t_i)) at 8 dim^2 real flops.
class PropagatorTable {
  public:
    PropagatorTable(const Eigen::MatrixXd& hi, const DiagonalHamiltonian& hf,
                    const StepGrid& grid)
        : grid_(grid), dim_(hf.diag.size()) {
        if (hi.rows() != dim_ || hi.cols() != dim_) {
            throw std::invalid_argument("initial and final Hamiltonian dimensions differ");
        }
        const std::int64_t bytes = propagator_table_bytes(grid.steps, dim_);
        if (bytes > kTableMemoryLimit) {
            throw ResourceLimitError(
                "propagator table would need " + std::to_string(bytes >> 20) +
                " MiB; reduce total_time/dt or the qubit count");
        }
        vecs_.resize(static_cast<std::size_t>(grid.steps));
        vals_.resize(static_cast<std::size_t>(grid.steps));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        for (int i = 0; i < grid.steps; ++i) {
            double s = grid.time_at(i) / grid.total_time;
            solver.compute(interpolate_real(hi, hf, s));
            vecs_[static_cast<std::size_t>(i)] = solver.eigenvectors();
            vals_[static_cast<std::size_t>(i)] = solver.eigenvalues();
        }
    }

    const StepGrid& grid() const { return grid_; }
    std::int64_t dim() const { return dim_; }
    const Eigen::VectorXd& eigenvalues(int step) const {
        return vals_[static_cast<std::size_t>(step)];
    }

    void apply(int step, double theta, StateVector& psi, StateVector& scratch) const {
        apply_eigen_rotation(vecs_[static_cast<std::size_t>(step)],
                             vals_[static_cast<std::size_t>(step)], theta, psi, scratch);
    }

  private:
    StepGrid grid_;
    std::int64_t dim_;
    std::vector<Eigen::MatrixXd> vecs_;
    std::vector<Eigen::VectorXd> vals_;
};

struct StepNoise {
    double phi = 0.0;
    double dw = 0.0;
};

using NoiseSource = std::function<StepNoise(int step, double t, double width)>;

// Lag kernel shared by both phi modes: k[d] = alpha (d dt + eps)^(alpha-1).
// Per-step-fresh phi at step i is sqrt(dt) sum_{k<i} k[i-k] g_k with fresh
// Gaussians; consistent-path phi reuses the diffusion increments dW_j.
struct PhiKernel {
    std::vector<double> lag;

    static PhiKernel build(const StepGrid& grid, const NoiseParams& params) {
        PhiKernel kernel;
        kernel.lag.assign(static_cast<std::size_t>(grid.steps), 0.0);
        const double alpha = params.alpha();
        if (alpha == 0.0) {
            return kernel;
        }
        for (int d = 1; d < grid.steps; ++d) {
            kernel.lag[static_cast<std::size_t>(d)] =
                alpha * std::pow(d * grid.dt + params.epsilon, alpha - 1.0);
        }
        return kernel;
    }
};

// Production noise: substreams keyed by (seed, step, purpose) so that phi and
// dW draws never interleave and realizations are order-independent.
class ModelNoiseSource {
  public:
    ModelNoiseSource(const NoiseParams& params, std::uint64_t seed, const PhiKernel& kernel,
                     double dt)
        : params_(params), seed_(seed), kernel_(kernel), sqrt_dt_(std::sqrt(dt)) {
        params_.validate();
    }

    StepNoise operator()(int step, double /*t*/, double width) {
        StepNoise out;
        Prng dw_rng(substream(seed_, static_cast<std::uint64_t>(step), Stream::brownian));
        out.dw = dw_rng.normal() * std::sqrt(width);
        if (params_.alpha() != 0.0 && step > 0) {
            double acc = 0.0;
            if (params_.phi_mode == PhiMode::per_step_fresh) {
                Prng g_rng(substream(seed_, static_cast<std::uint64_t>(step), Stream::phi));
                for (int k = 0; k < step; ++k) {
                    acc += kernel_.lag[static_cast<std::size_t>(step - k)] * g_rng.normal();
                }
                out.phi = sqrt_dt_ * acc;
            } else {
                for (int j = 0; j < step; ++j) {
                    acc += kernel_.lag[static_cast<std::size_t>(step - j)] * dw_history_[j];
                }
                out.phi = acc;
            }
        }
        dw_history_.push_back(out.dw);
        return out;
    }

  private:
    NoiseParams params_;
    std::uint64_t seed_;
    PhiKernel kernel_;
    double sqrt_dt_;
    std::vector<double> dw_history_;
};

inline NoiseSource make_model_noise_source(const NoiseParams& params, std::uint64_t seed,
                                           const PhiKernel& kernel, double dt) {
    auto state = std::make_shared<ModelNoiseSource>(params, seed, kernel, dt);
    return [state](int step, double t, double width) { return (*state)(step, t, width); };
}

struct Trajectory {
    std::vector<double> times;
    std::vector<double> fidelities;
    // Full states are kept for single-qubit systems only.
    std::vector<StateVector> states;
};

struct RunResult {
    StateVector final_state;
    double fidelity = 0.0;
    std::optional<Trajectory> trajectory;
};

// Core loop: theta_i = (1 + phi_i) width_i + eps^alpha dW_i, or plain
// width_i when no noise source is given. apply_step(i, theta, psi, scratch)
// supplies the propagator — either a precomputed table or a streaming solve.
template <typename ApplyFn>
RunResult run_loop(const StepGrid& grid, std::int64_t dim, std::int64_t ground_index,
                   const EvolutionConfig& cfg, const NoiseSource* source, ApplyFn&& apply_step) {
    StateVector psi = initial_state_of_dim(dim);
    StateVector scratch(dim);
    RunResult result;
    const bool keep_states = dim == 2;
    if (cfg.record_trajectory) {
        result.trajectory.emplace();
        result.trajectory->times.push_back(0.0);
        result.trajectory->fidelities.push_back(fidelity(psi, ground_index));
        if (keep_states) {
            result.trajectory->states.push_back(psi);
        }
    }
    double eps_alpha = 1.0;
    if (source != nullptr && cfg.noise.has_value()) {
        eps_alpha = std::pow(cfg.noise->epsilon, cfg.noise->alpha());
    }
    for (int i = 0; i < grid.steps; ++i) {
        const double width = grid.width_at(i);
        double theta = width;
        if (source != nullptr) {
            StepNoise sn = (*source)(i, grid.time_at(i), width);
            theta = noisy_theta(width, sn.phi, sn.dw, eps_alpha);
        }
        apply_step(i, theta, psi, scratch);
        if (cfg.record_trajectory) {
            result.trajectory->times.push_back(grid.time_at(i) + width);
            result.trajectory->fidelities.push_back(fidelity(psi, ground_index));
            if (keep_states) {
                result.trajectory->states.push_back(psi);
            }
        }
    }
    result.final_state = std::move(psi);
    result.fidelity = fidelity(result.final_state, ground_index);
    return result;
}

inline RunResult run_with_table(const PropagatorTable& table, std::int64_t ground_index,
                                const EvolutionConfig& cfg, const NoiseSource* source) {
    return run_loop(table.grid(), table.dim(), ground_index, cfg, source,
                    [&table](int i, double theta, StateVector& psi, StateVector& scratch) {
                        table.apply(i, theta, psi, scratch);
                    });
}

// Re-solves H(t_i) on the fly instead of caching the table; O(dim^2) memory,
// used when a schedule is too long for the table limit.
inline RunResult run_streaming(const Eigen::MatrixXd& hi, const DiagonalHamiltonian& hf,
                               std::int64_t ground_index, const StepGrid& grid,
                               const EvolutionConfig& cfg, const NoiseSource* source) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    return run_loop(grid, hf.diag.size(), ground_index, cfg, source,
                    [&](int i, double theta, StateVector& psi, StateVector& scratch) {
                        double s = grid.time_at(i) / grid.total_time;
                        solver.compute(interpolate_real(hi, hf, s));
                        apply_eigen_rotation(solver.eigenvectors(), solver.eigenvalues(), theta,
                                             psi, scratch);
                    });
}

inline Eigen::MatrixXd real_part_checked(const HermitianOperator& h) {
    if (h.imag().cwiseAbs().maxCoeff() > 1e-14) {
        throw std::invalid_argument(
            "this schedule expects a real symmetric driver Hamiltonian");
    }
    return h.real();
}

inline RunResult run_standard(const Eigen::MatrixXd& hi, const DiagonalHamiltonian& hf,
                              const EvolutionConfig& cfg) {
    if (cfg.noise.has_value()) {
        throw std::invalid_argument("run_standard is noiseless; use run_noisy");
    }
    StepGrid grid = make_step_grid(cfg.total_time, cfg.dt);
    if (propagator_table_bytes(grid.steps, hf.diag.size()) > kTableMemoryLimit) {
        return run_streaming(hi, hf, ground_state_index(hf), grid, cfg, nullptr);
    }
    PropagatorTable table(hi, hf, grid);
    return run_with_table(table, ground_state_index(hf), cfg, nullptr);
}

inline RunResult run_standard(const HermitianOperator& hi, const DiagonalHamiltonian& hf,
                              const EvolutionConfig& cfg) {
    return run_standard(real_part_checked(hi), hf, cfg);
}

inline RunResult run_noisy(const Eigen::MatrixXd& hi, const DiagonalHamiltonian& hf,
                           const EvolutionConfig& cfg) {
    if (!cfg.noise.has_value()) {
        throw std::invalid_argument("run_noisy needs noise parameters");
    }
    cfg.noise->validate();
    StepGrid grid = make_step_grid(cfg.total_time, cfg.dt);
    PhiKernel kernel = PhiKernel::build(grid, *cfg.noise);
    NoiseSource source = make_model_noise_source(*cfg.noise, cfg.seed, kernel, cfg.dt);
    if (propagator_table_bytes(grid.steps, hf.diag.size()) > kTableMemoryLimit) {
        return run_streaming(hi, hf, ground_state_index(hf), grid, cfg, &source);
    }
    PropagatorTable table(hi, hf, grid);
    return run_with_table(table, ground_state_index(hf), cfg, &source);
}

inline RunResult run_noisy(const HermitianOperator& hi, const DiagonalHamiltonian& hf,
                           const EvolutionConfig& cfg) {
    return run_noisy(real_part_checked(hi), hf, cfg);
}

}  // namespace qaasim

#endif
