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

#ifndef QAASIM_NOISE_HPP
#define QAASIM_NOISE_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qaasim/rng.hpp"

namespace qaasim {

// Semimartingale approximation of fractional Brownian motion with Hurst
// parameter H: B_t^eps = int_0^t phi(s) ds + eps^alpha W_t with
// alpha = H - 1/2 and phi(t) = alpha int_0^t (t - u + eps)^(alpha-1) dW_u.
// At H = 1/2 the kernel is flat and everything collapses to plain Brownian
// motion. The path sampler below realizes the defining integral directly,
// B^eps(t_i) = sum_{j<i} (t_i - t_j + eps)^alpha dW_j, so its covariance is
// the Riemann-Liouville one, t^(2H) / (2H) on the diagonal as eps -> 0, not
// the stationary-increment fBm covariance (see README).

enum class PhiMode {
    // Fresh Gaussians for the phi integral at every step.
    per_step_fresh,
    // phi accumulated from the same Brownian increments that drive the
    // diffusion term.
    consistent_path,
};

struct NoiseParams {
    double hurst = 0.5;
    double epsilon = 1e-3;
    PhiMode phi_mode = PhiMode::per_step_fresh;

    double alpha() const { return hurst - 0.5; }

    void validate() const {
        if (!(hurst > 0.0 && hurst < 1.0)) {
            throw std::invalid_argument("hurst must lie in (0, 1), got " + std::to_string(hurst));
        }
        if (!(epsilon > 0.0)) {
            throw std::invalid_argument("epsilon must be positive, got " +
                                        std::to_string(epsilon));
        }
    }
};

inline double brownian_increment(Prng& rng, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("time step must be positive, got " + std::to_string(dt));
    }
    return rng.normal() * std::sqrt(dt);
}

// phi(t) discretized over m subintervals of [0, t]:
//   phi = alpha sqrt(t/m) sum_{k=0}^{m-1} (t - k t/m + eps)^(alpha-1) g_k.
// Exactly 0 at t = 0 and for H = 1/2 (alpha = 0 kills the integrand).
inline double sample_phi(double t, const NoiseParams& params, int m_subintervals, Prng& rng) {
    params.validate();
    if (t < 0.0) {
        throw std::invalid_argument("time must be nonnegative, got " + std::to_string(t));
    }
    if (m_subintervals < 1) {
        throw std::invalid_argument("need at least one subinterval, got " +
                                    std::to_string(m_subintervals));
    }
    const double alpha = params.alpha();
    if (t == 0.0 || alpha == 0.0) {
        return 0.0;
    }
    const double dt = t / m_subintervals;
    double sum = 0.0;
    for (int k = 0; k < m_subintervals; ++k) {
        sum += std::pow(t - k * dt + params.epsilon, alpha - 1.0) * rng.normal();
    }
    return alpha * std::sqrt(dt) * sum;
}

// Closed-form variance of the sample_phi estimator; the statistical oracle
// for tests.
inline double phi_variance(double t, const NoiseParams& params, int m_subintervals) {
    params.validate();
    const double alpha = params.alpha();
    if (t == 0.0 || alpha == 0.0) {
        return 0.0;
    }
    const double dt = t / m_subintervals;
    double sum = 0.0;
    for (int k = 0; k < m_subintervals; ++k) {
        double w = std::pow(t - k * dt + params.epsilon, alpha - 1.0);
        sum += w * w;
    }
    return alpha * alpha * dt * sum;
}

struct FbmPath {
    std::vector<double> times;
    std::vector<double> values;
};

// One path of B^eps on a uniform grid starting at t = 0, built from a single
// sequence of Brownian increments.
inline FbmPath sample_fbm_path(const std::vector<double>& times, const NoiseParams& params,
                               Prng& rng) {
    params.validate();
    if (times.size() < 2) {
        throw std::invalid_argument("grid needs at least two points");
    }
    if (times.front() != 0.0) {
        throw std::invalid_argument("grid must start at t = 0");
    }
    const double delta = times[1] - times[0];
    if (!(delta > 0.0)) {
        throw std::invalid_argument("grid must be strictly increasing");
    }
    const double tol = 1e-9 * std::max(1.0, times.back());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (std::abs(times[i] - static_cast<double>(i) * delta) > tol) {
            throw std::invalid_argument("grid must be uniform");
        }
    }
    const double alpha = params.alpha();
    const std::size_t g = times.size();
    std::vector<double> dw(g - 1);
    for (std::size_t j = 0; j + 1 < g; ++j) {
        dw[j] = rng.normal() * std::sqrt(delta);
    }
    FbmPath path;
    path.times = times;
    path.values.assign(g, 0.0);
    for (std::size_t i = 1; i < g; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            acc += std::pow(times[i] - times[j] + params.epsilon, alpha) * dw[j];
        }
        path.values[i] = acc;
    }
    return path;
}

inline std::size_t find_grid_index(const std::vector<double>& times, double t) {
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (std::abs(times[i] - t) <= tol) {
            return i;
        }
    }
    throw std::invalid_argument("time " + std::to_string(t) + " is not on the path grid");
}

// Unbiased sample covariance of path values at grid times s and t.
inline double empirical_covariance(const std::vector<FbmPath>& paths, double s, double t) {
    if (paths.size() < 2) {
        throw std::invalid_argument("need at least two paths");
    }
    const std::size_t is = find_grid_index(paths.front().times, s);
    const std::size_t it = find_grid_index(paths.front().times, t);
    const double count = static_cast<double>(paths.size());
    double mean_s = 0.0, mean_t = 0.0;
    for (const FbmPath& p : paths) {
        if (p.times.size() != paths.front().times.size()) {
            throw std::invalid_argument("paths live on different grids");
        }
        mean_s += p.values[is];
        mean_t += p.values[it];
    }
    mean_s /= count;
    mean_t /= count;
    double acc = 0.0;
    for (const FbmPath& p : paths) {
        acc += (p.values[is] - mean_s) * (p.values[it] - mean_t);
    }
    return acc / (count - 1.0);
}

}  // namespace qaasim

#endif
