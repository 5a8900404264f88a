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

#ifndef QAASIM_IO_HPP
#define QAASIM_IO_HPP

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

namespace qaasim {

// Shortest decimal string that round-trips to the same double, so output
// files are byte-stable across runs and platforms with the same doubles.
inline std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    if (res.ec != std::errc()) {
        throw std::runtime_error("failed to format a double");
    }
    return std::string(buf, res.ptr);
}

// Minimal CSV assembly: numeric/identifier fields only, so no quoting rules.
struct CsvDocument {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> fields) {
        if (fields.size() != header.size()) {
            throw std::invalid_argument("CSV row width does not match the header");
        }
        rows.push_back(std::move(fields));
    }

    std::string str() const {
        std::ostringstream out;
        join_line(out, header);
        for (const std::vector<std::string>& row : rows) {
            join_line(out, row);
        }
        return out.str();
    }

  private:
    static void join_line(std::ostringstream& out, const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) {
                out << ',';
            }
            out << fields[i];
        }
        out << '\n';
    }
};

// Writes via a temp file plus rename, so readers never observe a partially
// written file and interrupted runs leave no ambiguous output.
inline void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw std::runtime_error("failed while writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string() + " for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// FNV-1a, used to fingerprint input files in run manifests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

inline std::string hex64(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

// One manifest per experiment run: the resolved configuration, input-file
// fingerprints, produced outputs, and completion status. wall_time_seconds is
// informational only and excluded from reproducibility comparisons.
struct RunManifest {
    std::string command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, content hash
    std::vector<std::string> outputs;
    bool complete = false;
    std::string error;
    nlohmann::ordered_json stats = nlohmann::ordered_json::object();
    double wall_time_seconds = 0.0;

    void add_input(const std::filesystem::path& path, std::string_view content) {
        inputs.emplace_back(path.string(), hex64(fnv1a64(content)));
    }

    std::string to_json() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["config"] = config;
        j["seed"] = seed;
        auto& in = j["inputs"] = nlohmann::ordered_json::array();
        for (const auto& [path, hash] : inputs) {
            in.push_back({{"path", path}, {"fnv1a64", hash}});
        }
        j["outputs"] = outputs;
        j["complete"] = complete;
        if (!error.empty()) {
            j["error"] = error;
        }
        if (!stats.empty()) {
            j["stats"] = stats;
        }
        j["wall_time_seconds"] = wall_time_seconds;
        return j.dump(2) + "\n";
    }
};

// Manifest equality modulo the wall-time field; used to verify that reruns
// with the same seed reproduce a run exactly.
inline bool manifests_equivalent(const std::string& a, const std::string& b) {
    nlohmann::json ja = nlohmann::json::parse(a);
    nlohmann::json jb = nlohmann::json::parse(b);
    ja.erase("wall_time_seconds");
    jb.erase("wall_time_seconds");
    return ja == jb;
}

}  // namespace qaasim

#endif
