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

#include "qaasim/experiments.hpp"

#include <cmath>
#include <cstring>

#include <catch2/catch_amalgamated.hpp>

using namespace qaasim;

namespace {

Ec3Instance four_bit() {
    return Ec3Instance{4, {{1, 2, 3}, {1, 3, 4}, {3, 1, 4}, {1, 2, 3}, {1, 2, 4}}};
}

}  // namespace

TEST_CASE("speedup ratio", "[experiments]") {
    CHECK(speedup(0.5, 0.5) == 1.0);
    CHECK(speedup(0.9447, 0.08204) == Catch::Approx(11.52).margin(0.01));
    CHECK_THROWS_AS(speedup(0.5, 0.0), UndefinedSpeedupError);
    CHECK_THROWS_AS(speedup(0.5, -0.1), UndefinedSpeedupError);
}

TEST_CASE("probability distributions", "[experiments]") {
    std::vector<double> uniform = probability_distribution(initial_state(3));
    REQUIRE(uniform.size() == 8);
    for (double p : uniform) {
        CHECK(p == Catch::Approx(0.125).margin(1e-15));
    }

    StateVector basis = StateVector::Zero(4);
    basis(2) = std::complex<double>(0.0, 1.0);
    std::vector<double> one_hot = probability_distribution(basis);
    CHECK(one_hot == std::vector<double>{0.0, 0.0, 1.0, 0.0});

    CHECK_THROWS_AS(probability_distribution(StateVector()), std::invalid_argument);
}

TEST_CASE("noiseless benchmark distribution", "[experiments]") {
    Ec3Instance inst = four_bit();
    EvolutionConfig cfg;
    cfg.total_time = 2.0;
    cfg.dt = 0.01;
    RunResult run = run_standard(initial_hamiltonian_real(4), build_final_hamiltonian(inst), cfg);
    std::vector<double> probs = probability_distribution(run.final_state);

    double sum = 0.0;
    for (double p : probs) {
        sum += p;
    }
    CHECK(std::abs(sum - 1.0) < 1e-10);
    // The (1,0,0,0) assignment sits at basis index 1 (x_1 is the low bit).
    CHECK(probs[1] == Catch::Approx(0.257).margin(0.015));
    CHECK(run.fidelity == probs[1]);
}

TEST_CASE("sweep shape and invariants", "[experiments]") {
    const std::vector<double> t_grid{1.0, 2.0};
    const std::vector<double> h_grid{0.5, 0.1};
    SweepResult res = sweep(four_bit(), t_grid, h_grid, 6, RunSettings{}, 7);

    REQUIRE(res.mean_fidelity.rows() == 2);
    REQUIRE(res.mean_fidelity.cols() == 2);
    REQUIRE(res.baseline_fidelity.size() == 2);
    CHECK(res.realizations == 6);
    for (Eigen::Index r = 0; r < 2; ++r) {
        CHECK(res.baseline_fidelity[static_cast<std::size_t>(r)] > 0.0);
        for (Eigen::Index c = 0; c < 2; ++c) {
            CHECK(res.mean_fidelity(r, c) >= 0.0);
            CHECK(res.mean_fidelity(r, c) <= 1.0);
            CHECK(res.std_error(r, c) >= 0.0);
            CHECK(res.speedup(r, c) ==
                  res.mean_fidelity(r, c) / res.baseline_fidelity[static_cast<std::size_t>(r)]);
        }
    }
}

TEST_CASE("sweep cells are invariant under grid reordering", "[experiments]") {
    SweepResult a = sweep(four_bit(), {1.0, 2.0}, {0.5, 0.1}, 4, RunSettings{}, 11);
    SweepResult b = sweep(four_bit(), {2.0, 1.0}, {0.1, 0.5}, 4, RunSettings{}, 11);
    for (int it = 0; it < 2; ++it) {
        for (int ih = 0; ih < 2; ++ih) {
            REQUIRE(a.mean_fidelity(it, ih) == b.mean_fidelity(1 - it, 1 - ih));
            REQUIRE(a.std_error(it, ih) == b.std_error(1 - it, 1 - ih));
            REQUIRE(a.speedup(it, ih) == b.speedup(1 - it, 1 - ih));
        }
    }
}

TEST_CASE("sweep aggregates are invariant under the thread count", "[experiments]") {
    SweepResult a = sweep(four_bit(), {1.0}, {0.3, 0.1}, 8, RunSettings{}, 5, 1);
    SweepResult b = sweep(four_bit(), {1.0}, {0.3, 0.1}, 8, RunSettings{}, 5, 4);
    CHECK(a.mean_fidelity == b.mean_fidelity);
    CHECK(a.std_error == b.std_error);
    CHECK(a.speedup == b.speedup);
}

TEST_CASE("zero-effect noise reproduces the baseline with speedup 1", "[experiments]") {
    Ec3Instance inst = four_bit();
    Eigen::MatrixXd hi = initial_hamiltonian_real(4);
    DiagonalHamiltonian hf = build_final_hamiltonian(inst);
    StepGrid grid = make_step_grid(2.0, 0.01);
    PropagatorTable table(hi, hf, grid);
    std::int64_t gidx = ground_state_index(hf);

    EvolutionConfig cfg;
    cfg.total_time = 2.0;
    cfg.dt = 0.01;
    cfg.noise = NoiseParams{0.3};
    NoiseSource zero = [](int, double, double) { return StepNoise{0.0, 0.0}; };
    const double forced = run_with_table(table, gidx, cfg, &zero).fidelity;

    EvolutionConfig plain;
    plain.total_time = 2.0;
    plain.dt = 0.01;
    const double baseline = run_with_table(table, gidx, plain, nullptr).fidelity;

    CHECK(forced == baseline);
    CHECK(speedup(forced, baseline) == 1.0);
}

TEST_CASE("sweep argument validation", "[experiments]") {
    CHECK_THROWS_AS(sweep(four_bit(), {}, {0.5}, 4, RunSettings{}, 0), std::invalid_argument);
    CHECK_THROWS_AS(sweep(four_bit(), {1.0}, {}, 4, RunSettings{}, 0), std::invalid_argument);
    CHECK_THROWS_AS(sweep(four_bit(), {1.0}, {0.5}, 0, RunSettings{}, 0), std::invalid_argument);
    CHECK_THROWS_AS(sweep(four_bit(), {1.0}, {1.5}, 4, RunSettings{}, 0), std::invalid_argument);
}

TEST_CASE("ensemble statistics", "[experiments]") {
    std::vector<Ec3Instance> instances;
    for (std::uint64_t k = 0; k < 3; ++k) {
        instances.push_back(generate_instance(4, substream(99, k)));
    }
    const std::vector<double> h_grid{0.5, 0.1};
    EnsembleStats stats = ensemble(instances, h_grid, 2.0, 4, RunSettings{}, 13);

    REQUIRE(stats.per_instance_mean.rows() == 3);
    REQUIRE(stats.per_instance_mean.cols() == 2);
    REQUIRE(stats.histogram.size() == 2);
    for (std::size_t ih = 0; ih < h_grid.size(); ++ih) {
        int total = 0;
        for (int c : stats.histogram[ih]) {
            total += c;
        }
        REQUIRE(total == 3);
        const Eigen::Index c = static_cast<Eigen::Index>(ih);
        CHECK(stats.mean[ih] == Catch::Approx(stats.per_instance_mean.col(c).mean()));
        double ss = (stats.per_instance_mean.col(c).array() - stats.mean[ih]).square().sum();
        CHECK(stats.stddev[ih] == Catch::Approx(std::sqrt(ss / 2.0)));
    }

    // Rerun with the same seed is bit-identical.
    EnsembleStats again = ensemble(instances, h_grid, 2.0, 4, RunSettings{}, 13);
    CHECK(stats.per_instance_mean == again.per_instance_mean);

    std::vector<Ec3Instance> mixed = instances;
    mixed.push_back(generate_instance(5, 1));
    CHECK_THROWS_AS(ensemble(mixed, h_grid, 2.0, 4, RunSettings{}, 13), std::invalid_argument);
    CHECK_THROWS_AS(ensemble({}, h_grid, 2.0, 4, RunSettings{}, 13), std::invalid_argument);
}

TEST_CASE("scaling study", "[experiments]") {
    const std::vector<int> n_grid{4, 5};
    const std::vector<double> h_grid{0.1};
    ScalingResult res = scaling_study(n_grid, 2, h_grid, 2.0, 4, RunSettings{}, 31);

    REQUIRE(res.mean_fidelity.rows() == 2);
    REQUIRE(res.mean_fidelity.cols() == 1);
    for (Eigen::Index r = 0; r < 2; ++r) {
        CHECK(res.mean_fidelity(r, 0) > 0.0);
        CHECK(res.mean_fidelity(r, 0) <= 1.0);
        CHECK(res.std_fidelity(r, 0) >= 0.0);
        CHECK(res.mean_speedup(r, 0) > 0.0);
        CHECK(res.std_speedup(r, 0) >= 0.0);
    }

    ScalingResult again = scaling_study(n_grid, 2, h_grid, 2.0, 4, RunSettings{}, 31);
    CHECK(res.mean_speedup == again.mean_speedup);

    CHECK_THROWS_AS(scaling_study({}, 2, h_grid, 2.0, 4, RunSettings{}, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(scaling_study(n_grid, 0, h_grid, 2.0, 4, RunSettings{}, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(scaling_study(n_grid, 2, h_grid, 2.0, 0, RunSettings{}, 0),
                    std::invalid_argument);
}

TEST_CASE("bloch coordinates", "[experiments]") {
    StateVector plus(2);
    plus << std::complex<double>(1.0 / std::sqrt(2.0), 0.0),
        std::complex<double>(1.0 / std::sqrt(2.0), 0.0);
    std::array<double, 3> p = bloch_point(plus);
    CHECK(p[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(p[1] == Catch::Approx(0.0).margin(1e-12));
    CHECK(p[2] == Catch::Approx(0.0).margin(1e-12));

    StateVector one = StateVector::Zero(2);
    one(1) = 1.0;
    std::array<double, 3> q = bloch_point(one);
    CHECK(q[0] == 0.0);
    CHECK(q[1] == 0.0);
    CHECK(q[2] == -1.0);

    CHECK_THROWS_AS(bloch_point(initial_state(2)), std::invalid_argument);
}

TEST_CASE("bloch trajectories stay on the sphere", "[experiments]") {
    DiagonalHamiltonian hf;
    hf.n = 1;
    hf.diag = Eigen::Vector2d(1.5, -1.5);

    EvolutionConfig cfg;
    cfg.total_time = 2.0;
    cfg.dt = 0.01;
    BlochTrajectory clean = bloch_trajectory(hf, cfg);
    REQUIRE(clean.points.size() == 201);
    CHECK(clean.points.front()[0] == Catch::Approx(1.0).margin(1e-12));
    double max_jump = 0.0;
    for (std::size_t i = 0; i < clean.points.size(); ++i) {
        const auto& p = clean.points[i];
        REQUIRE(std::abs(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - 1.0) < 1e-9);
        if (i > 0) {
            const auto& prev = clean.points[i - 1];
            max_jump = std::max(max_jump,
                                std::hypot(p[0] - prev[0], p[1] - prev[1], p[2] - prev[2]));
        }
    }
    // Pure-state rotation speed is bounded by the spectral width of H(s).
    CHECK(max_jump < 0.1);

    cfg.noise = NoiseParams{0.2};
    cfg.seed = 17;
    BlochTrajectory noisy = bloch_trajectory(hf, cfg);
    REQUIRE(noisy.points.size() == 201);
    for (const auto& p : noisy.points) {
        REQUIRE(std::abs(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - 1.0) < 1e-9);
    }

    DiagonalHamiltonian wrong;
    wrong.n = 2;
    wrong.diag = Eigen::Vector4d(1.0, 2.0, 3.0, 4.0);
    CHECK_THROWS_AS(bloch_trajectory(wrong, cfg), std::invalid_argument);
}

TEST_CASE("standard errors shrink with more realizations", "[experiments]") {
    // Quadrupling R should roughly halve the standard error.
    SweepResult small = sweep(four_bit(), {1.0}, {0.2}, 25, RunSettings{}, 3);
    SweepResult big = sweep(four_bit(), {1.0}, {0.2}, 100, RunSettings{}, 3);
    CHECK(big.std_error(0, 0) < small.std_error(0, 0));
    CHECK(big.std_error(0, 0) > 0.25 * small.std_error(0, 0));
}
