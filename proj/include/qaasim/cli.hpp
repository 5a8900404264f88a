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

#ifndef QAASIM_CLI_HPP
#define QAASIM_CLI_HPP

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qaasim/ec3.hpp"
#include "qaasim/errors.hpp"
#include "qaasim/evolve.hpp"
#include "qaasim/experiments.hpp"
#include "qaasim/hamiltonian.hpp"
#include "qaasim/io.hpp"
#include "qaasim/noise.hpp"
#include "qaasim/rng.hpp"

namespace qaasim {

// Constraint violation caught after flag parsing; exits with the usage code.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Command { generate, spectrum, evolve, sweep, ensemble, scaling, bloch };

inline const char* command_name(Command c) {
    switch (c) {
        case Command::generate: return "generate";
        case Command::spectrum: return "spectrum";
        case Command::evolve: return "evolve";
        case Command::sweep: return "sweep";
        case Command::ensemble: return "ensemble";
        case Command::scaling: return "scaling";
        case Command::bloch: return "bloch";
    }
    return "?";
}

// Fully resolved invocation; every field is validated against the owning
// module's preconditions before dispatch.
struct ExperimentConfig {
    Command command = Command::generate;
    std::string instance_path;
    std::string out_path;          // generate target file
    std::string output_dir = ".";
    int n = 0;
    std::vector<int> n_grid;
    double total_time = 0.0;
    std::vector<double> t_grid;
    std::vector<double> h_grid;
    std::optional<double> hurst;   // single-run noise toggle (evolve, bloch)
    double dt = 0.01;
    double epsilon = 1e-3;
    PhiMode phi_mode = PhiMode::per_step_fresh;
    int realizations = 100;
    int instances = 0;
    std::uint64_t seed = 0;
    int threads = 0;               // 0 = hardware concurrency
    double ds = 0.001;
    int levels = 3;
    bool trajectory = false;
    std::array<double, 2> hf_diag{1.5, -1.5};
};

namespace detail {

inline double parse_double_token(const std::string& flag, const std::string& token) {
    try {
        std::size_t pos = 0;
        double v = std::stod(token, &pos);
        if (pos != token.size() || !std::isfinite(v)) {
            throw std::invalid_argument(token);
        }
        return v;
    } catch (const std::exception&) {
        throw UsageError(flag + ": '" + token + "' is not a finite number");
    }
}

inline long long parse_int_token(const std::string& flag, const std::string& token) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(token, &pos);
        if (pos != token.size()) {
            throw std::invalid_argument(token);
        }
        return v;
    } catch (const std::exception&) {
        throw UsageError(flag + ": '" + token + "' is not an integer");
    }
}

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace detail

// Grid syntax: inclusive range `start:stop:step`, comma list `a,b,c`, or a
// single value.
inline std::vector<double> parse_double_grid(const std::string& flag, const std::string& text) {
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        const std::vector<std::string> parts = detail::split(text, ':');
        if (parts.size() != 3) {
            throw UsageError(flag + ": range syntax is start:stop:step");
        }
        const double start = detail::parse_double_token(flag, parts[0]);
        const double stop = detail::parse_double_token(flag, parts[1]);
        const double step = detail::parse_double_token(flag, parts[2]);
        if (!(step > 0.0)) {
            throw UsageError(flag + ": range step must be positive");
        }
        if (stop < start) {
            throw UsageError(flag + ": range stop must not precede start");
        }
        for (int k = 0;; ++k) {
            const double v = start + k * step;
            if (v > stop + 1e-9 * step) {
                break;
            }
            values.push_back(v);
        }
    } else {
        for (const std::string& token : detail::split(text, ',')) {
            values.push_back(detail::parse_double_token(flag, token));
        }
    }
    if (values.empty()) {
        throw UsageError(flag + ": empty grid");
    }
    return values;
}

inline std::vector<int> parse_int_grid(const std::string& flag, const std::string& text) {
    std::vector<int> values;
    for (double v : parse_double_grid(flag, text)) {
        const long long i = std::llround(v);
        if (std::abs(v - static_cast<double>(i)) > 1e-9) {
            throw UsageError(flag + ": expected integers");
        }
        values.push_back(static_cast<int>(i));
    }
    return values;
}

namespace detail {

inline void check_hurst_values(const std::vector<double>& values) {
    for (double h : values) {
        if (!(h > 0.0 && h < 1.0)) {
            throw UsageError("--hurst: Hurst exponent must lie in (0, 1), got " +
                             format_double(h));
        }
    }
}

inline void check_times(const std::vector<double>& t_values, double dt) {
    if (!(dt > 0.0)) {
        throw UsageError("--dt must be positive");
    }
    for (double t : t_values) {
        if (!(t >= dt)) {
            throw UsageError("--T: every evolution time must be at least --dt, got " +
                             format_double(t));
        }
    }
}

inline void check_qubit_flag(const std::string& flag, int n) {
    if (n < 3 || n > kMaxQubits) {
        throw UsageError(flag + ": qubit count must lie in [3, " + std::to_string(kMaxQubits) +
                         "], got " + std::to_string(n));
    }
}

inline PhiMode parse_phi_mode(const std::string& text) {
    if (text == "fresh") {
        return PhiMode::per_step_fresh;
    }
    if (text == "consistent") {
        return PhiMode::consistent_path;
    }
    throw UsageError("--phi-mode must be 'fresh' or 'consistent', got '" + text + "'");
}

}  // namespace detail

// Parses and validates argv (without the program name). Returns nullopt when
// help was requested, writing the help text to help_out. Throws
// CLI::ParseError for malformed flags and UsageError for constraint
// violations; neither leaves any file behind.
inline std::optional<ExperimentConfig> parse_config(const std::vector<std::string>& args,
                                                    std::ostream& help_out) {
    CLI::App app{"Adiabatic evolution under multiplicative fractional noise"};
    app.name("qaasim");
    app.require_subcommand(1);

    ExperimentConfig cfg;
    if (const char* env_dir = std::getenv("QAASIM_OUTPUT_DIR")) {
        cfg.output_dir = env_dir;
    }

    std::string t_text;
    std::string hurst_text;
    std::string n_text;
    std::string phi_text = "fresh";
    std::string hf_text;

    const auto add_output = [&](CLI::App* sub) {
        sub->add_option("-o,--output", cfg.output_dir,
                        "Output directory (default: $QAASIM_OUTPUT_DIR or '.')");
    };
    const auto add_seed = [&](CLI::App* sub) {
        sub->add_option("--seed", cfg.seed, "Base seed for all substreams");
    };
    const auto add_noise_knobs = [&](CLI::App* sub) {
        sub->add_option("--dt", cfg.dt, "Integration step (default 0.01)");
        sub->add_option("--epsilon", cfg.epsilon, "Regularization epsilon (default 1e-3)");
        sub->add_option("--phi-mode", phi_text, "Drift sampling: fresh | consistent");
    };
    const auto add_threads = [&](CLI::App* sub) {
        sub->add_option("--threads", cfg.threads, "Worker threads (0 = hardware)");
    };

    CLI::App* generate = app.add_subcommand("generate", "Generate a uniquely satisfiable instance");
    generate->add_option("--n", cfg.n, "Qubit count")->required();
    add_seed(generate);
    add_output(generate);
    generate->add_option("--out", cfg.out_path, "Instance file path (default derived)");

    CLI::App* spectrum = app.add_subcommand("spectrum", "Scan the instantaneous spectrum");
    spectrum->add_option("--instance", cfg.instance_path, "Instance JSON file")->required();
    spectrum->add_option("--ds", cfg.ds, "Schedule grid spacing (default 0.001)");
    spectrum->add_option("--levels", cfg.levels, "Number of lowest levels (default 3)");
    add_output(spectrum);

    CLI::App* evolve = app.add_subcommand("evolve", "Single adiabatic run");
    evolve->add_option("--instance", cfg.instance_path, "Instance JSON file")->required();
    evolve->add_option("--T", t_text, "Total evolution time")->required();
    evolve->add_option("--hurst", hurst_text, "Hurst exponent; omit for a noiseless run");
    add_noise_knobs(evolve);
    add_seed(evolve);
    add_output(evolve);
    evolve->add_flag("--trajectory", cfg.trajectory, "Write the fidelity trajectory CSV");

    CLI::App* sweep = app.add_subcommand("sweep", "T x Hurst fidelity/speedup sweep");
    sweep->add_option("--instance", cfg.instance_path, "Instance JSON file")->required();
    sweep->add_option("--T", t_text, "Evolution-time grid (start:stop:step or list)")->required();
    sweep->add_option("--hurst", hurst_text, "Hurst grid")->required();
    sweep->add_option("--realizations", cfg.realizations, "Noisy runs per cell (default 100)");
    add_noise_knobs(sweep);
    add_seed(sweep);
    add_threads(sweep);
    add_output(sweep);

    CLI::App* ensemble = app.add_subcommand("ensemble", "Random-instance fidelity distribution");
    ensemble->add_option("--n", cfg.n, "Qubit count")->required();
    ensemble->add_option("--instances", cfg.instances, "Instance count (default 20)")
        ->default_val(20);
    ensemble->add_option("--T", t_text, "Total evolution time")->required();
    ensemble->add_option("--hurst", hurst_text, "Hurst grid")->required();
    ensemble->add_option("--realizations", cfg.realizations, "Noisy runs per cell (default 100)");
    add_noise_knobs(ensemble);
    add_seed(ensemble);
    add_threads(ensemble);
    add_output(ensemble);

    CLI::App* scaling = app.add_subcommand("scaling", "Fidelity/speedup scaling with n");
    scaling->add_option("--n", n_text, "Qubit-count grid (start:stop:step or list)")->required();
    scaling->add_option("--instances", cfg.instances, "Instances per n (default 10)")
        ->default_val(10);
    scaling->add_option("--T", t_text, "Total evolution time")->required();
    scaling->add_option("--hurst", hurst_text, "Hurst grid")->required();
    scaling->add_option("--realizations", cfg.realizations, "Noisy runs per cell (default 100)");
    add_noise_knobs(scaling);
    add_seed(scaling);
    add_threads(scaling);
    add_output(scaling);

    CLI::App* bloch = app.add_subcommand("bloch", "Single-qubit Bloch trajectory");
    bloch->add_option("--T", t_text, "Total evolution time")->required();
    bloch->add_option("--hurst", hurst_text, "Hurst exponent; omit for a noiseless run");
    bloch->add_option("--hf-diag", hf_text, "Final Hamiltonian diagonal (default 1.5,-1.5)");
    bloch->add_option("--instance", cfg.instance_path,
                      "Instance file (must describe a single qubit)");
    add_noise_knobs(bloch);
    add_seed(bloch);
    add_output(bloch);

    std::vector<std::string> tokens = args;
    std::vector<char*> argv;
    std::string program = "qaasim";
    argv.push_back(program.data());
    for (std::string& token : tokens) {
        argv.push_back(token.data());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        help_out << app.help();
        return std::nullopt;
    } catch (const CLI::CallForAllHelp&) {
        help_out << app.help("", CLI::AppFormatMode::All);
        return std::nullopt;
    }

    cfg.phi_mode = detail::parse_phi_mode(phi_text);
    if (cfg.threads < 0) {
        throw UsageError("--threads must be nonnegative");
    }
    if (cfg.realizations < 1) {
        throw UsageError("--realizations must be at least 1");
    }
    if (!(cfg.epsilon > 0.0)) {
        throw UsageError("--epsilon must be positive");
    }

    if (generate->parsed()) {
        cfg.command = Command::generate;
        detail::check_qubit_flag("--n", cfg.n);
        if (cfg.out_path.empty()) {
            cfg.out_path = (std::filesystem::path(cfg.output_dir) /
                            ("instance_n" + std::to_string(cfg.n) + "_seed" +
                             std::to_string(cfg.seed) + ".json"))
                               .string();
        }
    } else if (spectrum->parsed()) {
        cfg.command = Command::spectrum;
        if (!(cfg.ds > 0.0 && cfg.ds <= 0.5)) {
            throw UsageError("--ds must lie in (0, 0.5]");
        }
        if (cfg.levels < 2) {
            throw UsageError("--levels must be at least 2");
        }
    } else if (evolve->parsed()) {
        cfg.command = Command::evolve;
        cfg.t_grid = parse_double_grid("--T", t_text);
        if (cfg.t_grid.size() != 1) {
            throw UsageError("--T: evolve takes a single evolution time");
        }
        cfg.total_time = cfg.t_grid.front();
        detail::check_times(cfg.t_grid, cfg.dt);
        if (!hurst_text.empty()) {
            cfg.h_grid = parse_double_grid("--hurst", hurst_text);
            if (cfg.h_grid.size() != 1) {
                throw UsageError("--hurst: evolve takes a single Hurst exponent");
            }
            detail::check_hurst_values(cfg.h_grid);
            cfg.hurst = cfg.h_grid.front();
        }
    } else if (sweep->parsed()) {
        cfg.command = Command::sweep;
        cfg.t_grid = parse_double_grid("--T", t_text);
        cfg.h_grid = parse_double_grid("--hurst", hurst_text);
        detail::check_times(cfg.t_grid, cfg.dt);
        detail::check_hurst_values(cfg.h_grid);
    } else if (ensemble->parsed()) {
        cfg.command = Command::ensemble;
        detail::check_qubit_flag("--n", cfg.n);
        if (cfg.instances < 1) {
            throw UsageError("--instances must be at least 1");
        }
        cfg.t_grid = parse_double_grid("--T", t_text);
        if (cfg.t_grid.size() != 1) {
            throw UsageError("--T: ensemble takes a single evolution time");
        }
        cfg.total_time = cfg.t_grid.front();
        cfg.h_grid = parse_double_grid("--hurst", hurst_text);
        detail::check_times(cfg.t_grid, cfg.dt);
        detail::check_hurst_values(cfg.h_grid);
    } else if (scaling->parsed()) {
        cfg.command = Command::scaling;
        cfg.n_grid = parse_int_grid("--n", n_text);
        for (int n : cfg.n_grid) {
            detail::check_qubit_flag("--n", n);
        }
        if (cfg.instances < 1) {
            throw UsageError("--instances must be at least 1");
        }
        cfg.t_grid = parse_double_grid("--T", t_text);
        if (cfg.t_grid.size() != 1) {
            throw UsageError("--T: scaling takes a single evolution time");
        }
        cfg.total_time = cfg.t_grid.front();
        cfg.h_grid = parse_double_grid("--hurst", hurst_text);
        detail::check_times(cfg.t_grid, cfg.dt);
        detail::check_hurst_values(cfg.h_grid);
    } else if (bloch->parsed()) {
        cfg.command = Command::bloch;
        cfg.t_grid = parse_double_grid("--T", t_text);
        if (cfg.t_grid.size() != 1) {
            throw UsageError("--T: bloch takes a single evolution time");
        }
        cfg.total_time = cfg.t_grid.front();
        detail::check_times(cfg.t_grid, cfg.dt);
        if (!hurst_text.empty()) {
            cfg.h_grid = parse_double_grid("--hurst", hurst_text);
            if (cfg.h_grid.size() != 1) {
                throw UsageError("--hurst: bloch takes a single Hurst exponent");
            }
            detail::check_hurst_values(cfg.h_grid);
            cfg.hurst = cfg.h_grid.front();
        }
        if (!hf_text.empty()) {
            const std::vector<double> d = parse_double_grid("--hf-diag", hf_text);
            if (d.size() != 2) {
                throw UsageError("--hf-diag expects exactly two comma-separated values");
            }
            cfg.hf_diag = {d[0], d[1]};
        }
    }
    return cfg;
}

namespace detail {

class WallClock {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline nlohmann::ordered_json noise_config_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["dt"] = cfg.dt;
    j["epsilon"] = cfg.epsilon;
    j["phi_mode"] = cfg.phi_mode == PhiMode::per_step_fresh ? "fresh" : "consistent";
    return j;
}

inline RunSettings settings_of(const ExperimentConfig& cfg) {
    return RunSettings{cfg.dt, cfg.epsilon, cfg.phi_mode};
}

inline Ec3Instance load_instance(const ExperimentConfig& cfg, RunManifest& manifest) {
    const std::string text = read_text_file(cfg.instance_path);
    manifest.add_input(cfg.instance_path, text);
    return parse_instance(text);
}

// Shared frame for every command that leaves files behind: on success the
// manifest lists the outputs; on failure it is still written, flagged
// incomplete, and the error is rethrown for the exit-code mapping.
template <typename Body>
int with_manifest(const ExperimentConfig& cfg, RunManifest& manifest, std::ostream& out,
                  Body&& body) {
    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    const std::string manifest_name = std::string(command_name(cfg.command)) + "_manifest.json";
    manifest.command = command_name(cfg.command);
    manifest.seed = cfg.seed;
    const WallClock clock;
    try {
        body(dir);
        manifest.complete = true;
    } catch (const std::exception& e) {
        manifest.complete = false;
        manifest.error = e.what();
        manifest.wall_time_seconds = clock.seconds();
        atomic_write_file(dir / manifest_name, manifest.to_json());
        throw;
    }
    manifest.wall_time_seconds = clock.seconds();
    atomic_write_file(dir / manifest_name, manifest.to_json());
    out << "wrote " << (dir / manifest_name).string() << "\n";
    return 0;
}

inline int cmd_generate(const ExperimentConfig& cfg, std::ostream& out) {
    const Ec3Instance instance = generate_instance(cfg.n, cfg.seed);
    atomic_write_file(cfg.out_path, serialize_instance(instance));
    out << "wrote " << cfg.out_path << "\n";
    return 0;
}

inline int cmd_spectrum(const ExperimentConfig& cfg, std::ostream& out) {
    RunManifest manifest;
    manifest.config["instance"] = cfg.instance_path;
    manifest.config["ds"] = cfg.ds;
    manifest.config["levels"] = cfg.levels;
    return with_manifest(cfg, manifest, out, [&](const std::filesystem::path& dir) {
        const Ec3Instance instance = load_instance(cfg, manifest);
        const SpectrumScan scan = spectrum_scan(initial_hamiltonian_real(instance.n),
                                                build_final_hamiltonian(instance), cfg.ds,
                                                cfg.levels);
        CsvDocument csv;
        csv.header = {"s"};
        for (Eigen::Index c = 0; c < scan.energies.cols(); ++c) {
            csv.header.push_back("E" + std::to_string(c));
        }
        for (std::size_t p = 0; p < scan.s_grid.size(); ++p) {
            std::vector<std::string> row{format_double(scan.s_grid[p])};
            for (Eigen::Index c = 0; c < scan.energies.cols(); ++c) {
                row.push_back(format_double(scan.energies(static_cast<Eigen::Index>(p), c)));
            }
            csv.add_row(std::move(row));
        }
        atomic_write_file(dir / "spectrum.csv", csv.str());
        manifest.outputs = {"spectrum.csv"};
        manifest.stats["gap_min"] = scan.gap_min;
        manifest.stats["s_at_min"] = scan.s_at_min;
        out << "gap_min = " << format_double(scan.gap_min)
            << " at s = " << format_double(scan.s_at_min) << "\n";
    });
}

inline int cmd_evolve(const ExperimentConfig& cfg, std::ostream& out) {
    RunManifest manifest;
    manifest.config["instance"] = cfg.instance_path;
    manifest.config["T"] = cfg.total_time;
    manifest.config.update(noise_config_json(cfg));
    manifest.config["hurst"] = cfg.hurst.has_value() ? nlohmann::ordered_json(*cfg.hurst)
                                                     : nlohmann::ordered_json(nullptr);

    const auto run_once = [&](const Ec3Instance& instance) {
        EvolutionConfig run_cfg;
        run_cfg.total_time = cfg.total_time;
        run_cfg.dt = cfg.dt;
        run_cfg.seed = cfg.seed;
        run_cfg.record_trajectory = cfg.trajectory;
        if (cfg.hurst.has_value()) {
            run_cfg.noise = NoiseParams{*cfg.hurst, cfg.epsilon, cfg.phi_mode};
        }
        const Eigen::MatrixXd hi = initial_hamiltonian_real(instance.n);
        const DiagonalHamiltonian hf = build_final_hamiltonian(instance);
        return cfg.hurst.has_value() ? run_noisy(hi, hf, run_cfg)
                                     : run_standard(hi, hf, run_cfg);
    };

    if (!cfg.trajectory) {
        const std::string text = read_text_file(cfg.instance_path);
        const RunResult result = run_once(parse_instance(text));
        out << "fidelity = " << format_double(result.fidelity) << "\n";
        return 0;
    }
    return with_manifest(cfg, manifest, out, [&](const std::filesystem::path& dir) {
        const RunResult result = run_once(load_instance(cfg, manifest));
        CsvDocument csv;
        csv.header = {"t", "F"};
        for (std::size_t i = 0; i < result.trajectory->times.size(); ++i) {
            csv.add_row({format_double(result.trajectory->times[i]),
                         format_double(result.trajectory->fidelities[i])});
        }
        atomic_write_file(dir / "evolve.csv", csv.str());
        manifest.outputs = {"evolve.csv"};
        manifest.stats["fidelity"] = result.fidelity;
        out << "fidelity = " << format_double(result.fidelity) << "\n";
    });
}

inline int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out) {
    RunManifest manifest;
    manifest.config["instance"] = cfg.instance_path;
    manifest.config["T"] = cfg.t_grid;
    manifest.config["hurst"] = cfg.h_grid;
    manifest.config["realizations"] = cfg.realizations;
    manifest.config.update(noise_config_json(cfg));
    manifest.config["threads"] = cfg.threads;
    return with_manifest(cfg, manifest, out, [&](const std::filesystem::path& dir) {
        const Ec3Instance instance = load_instance(cfg, manifest);
        const SweepResult result = sweep(instance, cfg.t_grid, cfg.h_grid, cfg.realizations,
                                         settings_of(cfg), cfg.seed, cfg.threads);
        CsvDocument csv;
        csv.header = {"T", "H", "mean_F", "se_F", "F0", "SP"};
        for (std::size_t it = 0; it < result.t_grid.size(); ++it) {
            for (std::size_t ih = 0; ih < result.h_grid.size(); ++ih) {
                const Eigen::Index r = static_cast<Eigen::Index>(it);
                const Eigen::Index c = static_cast<Eigen::Index>(ih);
                csv.add_row({format_double(result.t_grid[it]), format_double(result.h_grid[ih]),
                             format_double(result.mean_fidelity(r, c)),
                             format_double(result.std_error(r, c)),
                             format_double(result.baseline_fidelity[it]),
                             format_double(result.speedup(r, c))});
            }
        }
        atomic_write_file(dir / "sweep.csv", csv.str());
        manifest.outputs = {"sweep.csv"};
    });
}

inline int cmd_ensemble(const ExperimentConfig& cfg, std::ostream& out) {
    RunManifest manifest;
    manifest.config["n"] = cfg.n;
    manifest.config["instances"] = cfg.instances;
    manifest.config["T"] = cfg.total_time;
    manifest.config["hurst"] = cfg.h_grid;
    manifest.config["realizations"] = cfg.realizations;
    manifest.config.update(noise_config_json(cfg));
    manifest.config["threads"] = cfg.threads;
    return with_manifest(cfg, manifest, out, [&](const std::filesystem::path& dir) {
        std::vector<Ec3Instance> instances;
        instances.reserve(static_cast<std::size_t>(cfg.instances));
        for (int i = 0; i < cfg.instances; ++i) {
            instances.push_back(
                generate_instance(cfg.n, substream(cfg.seed, static_cast<std::uint64_t>(i))));
        }
        const EnsembleStats stats = ensemble(instances, cfg.h_grid, cfg.total_time,
                                             cfg.realizations, settings_of(cfg), cfg.seed,
                                             cfg.threads);
        CsvDocument csv;
        csv.header = {"instance_id", "H", "mean_F"};
        for (Eigen::Index i = 0; i < stats.per_instance_mean.rows(); ++i) {
            for (std::size_t ih = 0; ih < stats.h_grid.size(); ++ih) {
                csv.add_row({std::to_string(i), format_double(stats.h_grid[ih]),
                             format_double(stats.per_instance_mean(
                                 i, static_cast<Eigen::Index>(ih)))});
            }
        }
        atomic_write_file(dir / "ensemble.csv", csv.str());
        manifest.outputs = {"ensemble.csv"};
        // Build the per-H tables locally: ordered_json objects are vector
        // backed, so references into stats would dangle after later inserts.
        nlohmann::ordered_json hist = nlohmann::ordered_json::object();
        nlohmann::ordered_json mean = nlohmann::ordered_json::object();
        nlohmann::ordered_json stddev = nlohmann::ordered_json::object();
        for (std::size_t ih = 0; ih < stats.h_grid.size(); ++ih) {
            const std::string key = format_double(stats.h_grid[ih]);
            hist[key] = stats.histogram[ih];
            mean[key] = stats.mean[ih];
            stddev[key] = stats.stddev[ih];
        }
        manifest.stats["histogram_bin_width"] = kHistogramBinWidth;
        manifest.stats["histogram"] = std::move(hist);
        manifest.stats["mean"] = std::move(mean);
        manifest.stats["stddev"] = std::move(stddev);
    });
}

inline int cmd_scaling(const ExperimentConfig& cfg, std::ostream& out) {
    RunManifest manifest;
    manifest.config["n"] = cfg.n_grid;
    manifest.config["instances"] = cfg.instances;
    manifest.config["T"] = cfg.total_time;
    manifest.config["hurst"] = cfg.h_grid;
    manifest.config["realizations"] = cfg.realizations;
    manifest.config.update(noise_config_json(cfg));
    manifest.config["threads"] = cfg.threads;
    return with_manifest(cfg, manifest, out, [&](const std::filesystem::path& dir) {
        const ScalingResult result =
            scaling_study(cfg.n_grid, cfg.instances, cfg.h_grid, cfg.total_time,
                          cfg.realizations, settings_of(cfg), cfg.seed, cfg.threads);
        CsvDocument csv;
        csv.header = {"n", "H", "mean_F", "std_F", "mean_SP", "std_SP"};
        for (std::size_t in = 0; in < result.n_grid.size(); ++in) {
            for (std::size_t ih = 0; ih < result.h_grid.size(); ++ih) {
                const Eigen::Index r = static_cast<Eigen::Index>(in);
                const Eigen::Index c = static_cast<Eigen::Index>(ih);
                csv.add_row({std::to_string(result.n_grid[in]),
                             format_double(result.h_grid[ih]),
                             format_double(result.mean_fidelity(r, c)),
                             format_double(result.std_fidelity(r, c)),
                             format_double(result.mean_speedup(r, c)),
                             format_double(result.std_speedup(r, c))});
            }
        }
        atomic_write_file(dir / "scaling.csv", csv.str());
        manifest.outputs = {"scaling.csv"};
    });
}

inline int cmd_bloch(const ExperimentConfig& cfg, std::ostream& out) {
    RunManifest manifest;
    manifest.config["T"] = cfg.total_time;
    manifest.config.update(noise_config_json(cfg));
    manifest.config["hurst"] = cfg.hurst.has_value() ? nlohmann::ordered_json(*cfg.hurst)
                                                     : nlohmann::ordered_json(nullptr);
    manifest.config["hf_diag"] = cfg.hf_diag;
    return with_manifest(cfg, manifest, out, [&](const std::filesystem::path& dir) {
        DiagonalHamiltonian hf;
        if (!cfg.instance_path.empty()) {
            const Ec3Instance instance = load_instance(cfg, manifest);
            if (instance.n != 1) {
                throw std::invalid_argument("bloch requires a single-qubit system");
            }
            hf = build_final_hamiltonian(instance);
        } else {
            hf.n = 1;
            hf.diag = Eigen::Vector2d(cfg.hf_diag[0], cfg.hf_diag[1]);
        }
        EvolutionConfig run_cfg;
        run_cfg.total_time = cfg.total_time;
        run_cfg.dt = cfg.dt;
        run_cfg.seed = cfg.seed;
        if (cfg.hurst.has_value()) {
            run_cfg.noise = NoiseParams{*cfg.hurst, cfg.epsilon, cfg.phi_mode};
        }
        const BlochTrajectory trajectory = bloch_trajectory(hf, run_cfg);
        CsvDocument csv;
        csv.header = {"t", "x", "y", "z"};
        for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
            csv.add_row({format_double(trajectory.times[i]),
                         format_double(trajectory.points[i][0]),
                         format_double(trajectory.points[i][1]),
                         format_double(trajectory.points[i][2])});
        }
        atomic_write_file(dir / "bloch.csv", csv.str());
        manifest.outputs = {"bloch.csv"};
    });
}

}  // namespace detail

// Runs the named experiment; 0 on success, 2 on runtime failure.
inline int dispatch(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        switch (cfg.command) {
            case Command::generate: return detail::cmd_generate(cfg, out);
            case Command::spectrum: return detail::cmd_spectrum(cfg, out);
            case Command::evolve: return detail::cmd_evolve(cfg, out);
            case Command::sweep: return detail::cmd_sweep(cfg, out);
            case Command::ensemble: return detail::cmd_ensemble(cfg, out);
            case Command::scaling: return detail::cmd_scaling(cfg, out);
            case Command::bloch: return detail::cmd_bloch(cfg, out);
        }
        err << "error: unknown command\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

// Exit codes: 0 success or help, 1 usage error, 2 runtime error.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::optional<ExperimentConfig> cfg;
    try {
        cfg = parse_config(args, out);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    }
    if (!cfg.has_value()) {
        return 0;
    }
    return dispatch(*cfg, out, err);
}

}  // namespace qaasim

#endif
