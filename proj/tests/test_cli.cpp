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

#include "qaasim/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

using namespace qaasim;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    CliRun run;
    run.code = run_cli(args, out, err);
    run.out = out.str();
    run.err = err.str();
    return run;
}

std::filesystem::path fresh_dir(const std::string& tag) {
    std::filesystem::path dir =
        std::filesystem::temp_directory_path() / ("qaasim_cli_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write_four_bit_instance(const std::filesystem::path& dir) {
    const Ec3Instance inst{4, {{1, 2, 3}, {1, 3, 4}, {3, 1, 4}, {1, 2, 3}, {1, 2, 4}}};
    const std::filesystem::path path = dir / "four.json";
    atomic_write_file(path, serialize_instance(inst));
    return path.string();
}

int count_lines(const std::string& text) {
    int lines = 0;
    for (char c : text) {
        if (c == '\n') {
            ++lines;
        }
    }
    return lines;
}

}  // namespace

TEST_CASE("grid syntax", "[cli]") {
    CHECK(parse_double_grid("--T", "1:8:1") ==
          std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
    CHECK(parse_double_grid("--hurst", "0.01,0.1,0.25,0.5") ==
          std::vector<double>{0.01, 0.1, 0.25, 0.5});
    CHECK(parse_double_grid("--T", "2") == std::vector<double>{2});
    CHECK(parse_double_grid("--T", "0:1:0.25") ==
          std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(parse_int_grid("--n", "4:8:2") == std::vector<int>{4, 6, 8});

    CHECK_THROWS_AS(parse_double_grid("--T", "1:2"), UsageError);
    CHECK_THROWS_AS(parse_double_grid("--T", "abc"), UsageError);
    CHECK_THROWS_AS(parse_double_grid("--T", "2:1:1"), UsageError);
    CHECK_THROWS_AS(parse_double_grid("--T", "1:2:0"), UsageError);
    CHECK_THROWS_AS(parse_double_grid("--T", "1,,2"), UsageError);
    CHECK_THROWS_AS(parse_int_grid("--n", "4.5"), UsageError);
}

TEST_CASE("help and usage errors", "[cli]") {
    CliRun help = cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("Subcommands") != std::string::npos);

    CHECK(cli({}).code == 1);
    CHECK(cli({"sweep", "--bogus-flag", "3"}).code == 1);
    CHECK(cli({"sweep", "--T", "2", "--hurst", "0.5"}).code == 1);  // missing --instance

    const std::filesystem::path dir = fresh_dir("usage");
    const std::string inst = write_four_bit_instance(dir);
    CliRun bad_hurst = cli({"sweep", "--instance", inst, "--T", "2", "--hurst", "1.2",
                            "-o", dir.string()});
    CHECK(bad_hurst.code == 1);
    CHECK(bad_hurst.err.find("--hurst") != std::string::npos);

    CHECK(cli({"sweep", "--instance", inst, "--T", "2", "--hurst", "0.5", "--dt", "0",
               "-o", dir.string()})
              .code == 1);
    CHECK(cli({"sweep", "--instance", inst, "--T", "2", "--hurst", "0.5", "--phi-mode",
               "sometimes", "-o", dir.string()})
              .code == 1);
    CHECK(cli({"sweep", "--instance", inst, "--T", "2", "--hurst", "0.5",
               "--realizations", "0", "-o", dir.string()})
              .code == 1);
    CHECK(cli({"generate", "--n", "2", "-o", dir.string()}).code == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("generate is deterministic", "[cli]") {
    const std::filesystem::path dir = fresh_dir("generate");
    CliRun first = cli({"generate", "--n", "6", "--seed", "42", "-o", dir.string()});
    REQUIRE(first.code == 0);
    const std::filesystem::path path = dir / "instance_n6_seed42.json";
    REQUIRE(std::filesystem::exists(path));
    const std::string bytes = read_text_file(path);

    const Ec3Instance inst = parse_instance(bytes);
    CHECK(inst.n == 6);
    CHECK(count_satisfying(inst) == 1);

    REQUIRE(cli({"generate", "--n", "6", "--seed", "42", "-o", dir.string()}).code == 0);
    CHECK(read_text_file(path) == bytes);

    // A custom output path is honored.
    const std::string custom = (dir / "custom.json").string();
    REQUIRE(cli({"generate", "--n", "5", "--seed", "1", "--out", custom}).code == 0);
    CHECK(std::filesystem::exists(custom));
    std::filesystem::remove_all(dir);
}

TEST_CASE("evolve prints the benchmark fidelity", "[cli]") {
    const std::filesystem::path dir = fresh_dir("evolve");
    const std::string inst = write_four_bit_instance(dir);

    CliRun run = cli({"evolve", "--instance", inst, "--T", "2"});
    REQUIRE(run.code == 0);
    REQUIRE(run.out.rfind("fidelity = ", 0) == 0);
    const double fidelity = std::stod(run.out.substr(std::string("fidelity = ").size()));
    CHECK(fidelity == Catch::Approx(0.257).margin(0.015));

    CliRun traj = cli({"evolve", "--instance", inst, "--T", "2", "--trajectory", "-o",
                       dir.string()});
    REQUIRE(traj.code == 0);
    const std::string csv = read_text_file(dir / "evolve.csv");
    CHECK(csv.rfind("t,F\n", 0) == 0);
    CHECK(count_lines(csv) == 202);  // header + 201 grid points
    const nlohmann::json manifest =
        nlohmann::json::parse(read_text_file(dir / "evolve_manifest.json"));
    CHECK(manifest["complete"] == true);
    CHECK(manifest["outputs"][0] == "evolve.csv");

    // A noisy run at the same T reports a different fidelity.
    CliRun noisy = cli({"evolve", "--instance", inst, "--T", "2", "--hurst", "0.1",
                        "--seed", "5"});
    REQUIRE(noisy.code == 0);
    CHECK(noisy.out != run.out);
    std::filesystem::remove_all(dir);
}

TEST_CASE("spectrum emits the scan table", "[cli]") {
    const std::filesystem::path dir = fresh_dir("spectrum");
    const std::string inst = write_four_bit_instance(dir);
    CliRun run = cli({"spectrum", "--instance", inst, "--ds", "0.01", "-o", dir.string()});
    REQUIRE(run.code == 0);
    CHECK(run.out.find("gap_min = ") != std::string::npos);
    const std::string csv = read_text_file(dir / "spectrum.csv");
    CHECK(csv.rfind("s,E0,E1,E2\n", 0) == 0);
    CHECK(count_lines(csv) == 102);  // header + 101 schedule points
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep outputs are byte-stable", "[cli]") {
    const std::filesystem::path dir = fresh_dir("sweep");
    const std::string inst = write_four_bit_instance(dir);
    const std::vector<std::string> base{"sweep",  "--instance",     inst,
                                        "--T",    "1:2:1",          "--hurst",
                                        "0.5,0.1", "--realizations", "3",
                                        "--seed", "7"};

    auto with_output = [&](const std::string& sub, std::vector<std::string> extra) {
        std::vector<std::string> args = base;
        args.push_back("-o");
        args.push_back((dir / sub).string());
        for (std::string& e : extra) {
            args.push_back(std::move(e));
        }
        return args;
    };

    REQUIRE(cli(with_output("a", {})).code == 0);
    REQUIRE(cli(with_output("b", {})).code == 0);
    const std::string csv_a = read_text_file(dir / "a" / "sweep.csv");
    CHECK(csv_a == read_text_file(dir / "b" / "sweep.csv"));
    CHECK(csv_a.rfind("T,H,mean_F,se_F,F0,SP\n", 0) == 0);
    CHECK(count_lines(csv_a) == 5);  // header + 2x2 cells

    CHECK(manifests_equivalent(read_text_file(dir / "a" / "sweep_manifest.json"),
                               read_text_file(dir / "b" / "sweep_manifest.json")));

    // The thread count changes scheduling only, never the bytes of the table.
    REQUIRE(cli(with_output("c", {"--threads", "4"})).code == 0);
    CHECK(csv_a == read_text_file(dir / "c" / "sweep.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("ensemble manifest carries the histogram", "[cli]") {
    const std::filesystem::path dir = fresh_dir("ensemble");
    CliRun run = cli({"ensemble", "--n", "4", "--instances", "3", "--T", "1", "--hurst",
                      "0.5,0.1", "--realizations", "2", "--seed", "9", "-o", dir.string()});
    REQUIRE(run.code == 0);
    const std::string csv = read_text_file(dir / "ensemble.csv");
    CHECK(csv.rfind("instance_id,H,mean_F\n", 0) == 0);
    CHECK(count_lines(csv) == 7);  // header + 3 instances x 2 hurst

    const nlohmann::json manifest =
        nlohmann::json::parse(read_text_file(dir / "ensemble_manifest.json"));
    REQUIRE(manifest["stats"]["histogram"].contains("0.1"));
    int total = 0;
    for (const auto& count : manifest["stats"]["histogram"]["0.1"]) {
        total += count.get<int>();
    }
    CHECK(total == 3);
    std::filesystem::remove_all(dir);
}

TEST_CASE("scaling emits one row per (n, H)", "[cli]") {
    const std::filesystem::path dir = fresh_dir("scaling");
    CliRun run = cli({"scaling", "--n", "4:5:1", "--instances", "2", "--T", "1", "--hurst",
                      "0.1", "--realizations", "2", "--seed", "3", "-o", dir.string()});
    REQUIRE(run.code == 0);
    const std::string csv = read_text_file(dir / "scaling.csv");
    CHECK(csv.rfind("n,H,mean_F,std_F,mean_SP,std_SP\n", 0) == 0);
    CHECK(count_lines(csv) == 3);
    std::filesystem::remove_all(dir);
}

TEST_CASE("bloch demands a single qubit", "[cli]") {
    const std::filesystem::path dir = fresh_dir("bloch");
    const std::string inst = write_four_bit_instance(dir);

    CliRun bad = cli({"bloch", "--T", "2", "--instance", inst, "-o", dir.string()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("bloch requires a single-qubit system") != std::string::npos);
    const nlohmann::json failed =
        nlohmann::json::parse(read_text_file(dir / "bloch_manifest.json"));
    CHECK(failed["complete"] == false);

    CliRun good = cli({"bloch", "--T", "2", "--seed", "1", "-o", dir.string()});
    REQUIRE(good.code == 0);
    const std::string csv = read_text_file(dir / "bloch.csv");
    REQUIRE(csv.rfind("t,x,y,z\n", 0) == 0);
    // First data row is the |+> point (1, 0, 0).
    std::istringstream lines(csv);
    std::string header;
    std::string first;
    std::getline(lines, header);
    std::getline(lines, first);
    REQUIRE(first.rfind("0,", 0) == 0);
    double x = 0.0;
    double y = 1.0;
    double z = 1.0;
    std::sscanf(first.c_str(), "0,%lf,%lf,%lf", &x, &y, &z);
    CHECK(x == Catch::Approx(1.0).margin(1e-12));
    CHECK(y == Catch::Approx(0.0).margin(1e-12));
    CHECK(z == Catch::Approx(0.0).margin(1e-12));
    std::filesystem::remove_all(dir);
}

TEST_CASE("output directory falls back to the environment", "[cli]") {
    const std::filesystem::path dir = fresh_dir("envdir");
    REQUIRE(setenv("QAASIM_OUTPUT_DIR", dir.c_str(), 1) == 0);
    CliRun run = cli({"generate", "--n", "4", "--seed", "8"});
    REQUIRE(unsetenv("QAASIM_OUTPUT_DIR") == 0);
    REQUIRE(run.code == 0);
    CHECK(std::filesystem::exists(dir / "instance_n4_seed8.json"));
    std::filesystem::remove_all(dir);
}
