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

#ifndef QAASIM_EC3_HPP
#define QAASIM_EC3_HPP

#include <array>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qaasim/errors.hpp"
#include "qaasim/rng.hpp"

namespace qaasim {

// Exact Cover 3: a clause over three distinct bits is satisfied when exactly
// one of them is 1. Bit indices are 1-based throughout; computational-basis
// indices put x_1 in the least significant position, index(x) = sum_i x_i
// 2^(i-1), and display strings render x_1 leftmost.

struct Clause {
    int i = 0;
    int j = 0;
    int k = 0;

    std::array<int, 3> sorted() const {
        std::array<int, 3> s{i, j, k};
        if (s[0] > s[1]) std::swap(s[0], s[1]);
        if (s[1] > s[2]) std::swap(s[1], s[2]);
        if (s[0] > s[1]) std::swap(s[0], s[1]);
        return s;
    }
};

struct Ec3Instance {
    int n = 0;
    std::vector<Clause> clauses;
};

// One bit per variable, x[0] holds x_1.
using Assignment = std::vector<std::uint8_t>;

inline constexpr int kMaxCountBits = 20;

inline Assignment assignment_from_index(int n, std::uint64_t index) {
    Assignment x(static_cast<std::size_t>(n));
    for (int b = 0; b < n; ++b) {
        x[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>((index >> b) & 1u);
    }
    return x;
}

inline std::uint64_t index_of_assignment(const Assignment& x) {
    std::uint64_t idx = 0;
    for (std::size_t b = 0; b < x.size(); ++b) {
        idx |= static_cast<std::uint64_t>(x[b] & 1u) << b;
    }
    return idx;
}

inline std::string assignment_string(const Assignment& x) {
    std::string s;
    s.reserve(x.size());
    for (std::uint8_t b : x) {
        s.push_back(b ? '1' : '0');
    }
    return s;
}

inline void check_instance(const Ec3Instance& inst) {
    if (inst.n < 3) {
        throw std::invalid_argument("EC3 instance needs n >= 3, got n = " + std::to_string(inst.n));
    }
    for (std::size_t c = 0; c < inst.clauses.size(); ++c) {
        const Clause& cl = inst.clauses[c];
        for (int v : {cl.i, cl.j, cl.k}) {
            if (v < 1 || v > inst.n) {
                throw std::invalid_argument(
                    "clause " + std::to_string(c + 1) + " references bit " + std::to_string(v) +
                    " outside [1, " + std::to_string(inst.n) + "]");
            }
        }
        if (cl.i == cl.j || cl.j == cl.k || cl.i == cl.k) {
            throw std::invalid_argument(
                "clause " + std::to_string(c + 1) + " repeats a bit index");
        }
    }
}

// f(x) = sum over clauses of (1 - x_i - x_j - x_k)^2; zero exactly on
// satisfying assignments.
inline int objective(const Ec3Instance& inst, const Assignment& x) {
    if (static_cast<int>(x.size()) != inst.n) {
        throw std::invalid_argument(
            "assignment has " + std::to_string(x.size()) + " bits, instance has n = " +
            std::to_string(inst.n));
    }
    int f = 0;
    for (const Clause& cl : inst.clauses) {
        int ones = x[static_cast<std::size_t>(cl.i - 1)] + x[static_cast<std::size_t>(cl.j - 1)] +
                   x[static_cast<std::size_t>(cl.k - 1)];
        int r = 1 - ones;
        f += r * r;
    }
    return f;
}

inline bool satisfies(const Ec3Instance& inst, const Assignment& x) {
    return objective(inst, x) == 0;
}

// Brute-force count over all 2^n assignments.
inline int count_satisfying(const Ec3Instance& inst) {
    check_instance(inst);
    if (inst.n > kMaxCountBits) {
        throw ResourceLimitError(
            "count_satisfying enumerates 2^n assignments; n = " + std::to_string(inst.n) +
            " exceeds the limit of " + std::to_string(kMaxCountBits));
    }
    int count = 0;
    const std::uint64_t total = std::uint64_t{1} << inst.n;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        bool ok = true;
        for (const Clause& cl : inst.clauses) {
            unsigned ones = ((idx >> (cl.i - 1)) & 1u) + ((idx >> (cl.j - 1)) & 1u) +
                            ((idx >> (cl.k - 1)) & 1u);
            if (ones != 1u) {
                ok = false;
                break;
            }
        }
        count += ok ? 1 : 0;
    }
    return count;
}

// Returns the index of the unique satisfying assignment.
// Requires count_satisfying(inst) == 1.
inline std::uint64_t unique_satisfying_index(const Ec3Instance& inst) {
    const std::uint64_t total = std::uint64_t{1} << inst.n;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        if (objective(inst, assignment_from_index(inst.n, idx)) == 0) {
            return idx;
        }
    }
    throw std::invalid_argument("instance has no satisfying assignment");
}

struct GenerateLimits {
    int max_restarts = 10000;
    // Draw attempts per clause before the partial instance is abandoned
    // (relevant when nearly all index-sets are already used).
    int max_draws_per_clause = 2000;
};

// Adds uniformly drawn distinct-triple clauses, never repeating an index-set,
// until the count of satisfying assignments drops to 1 (retain) or 0
// (restart). For n = 3 the only possible clause leaves 3 satisfying
// assignments, so generation provably exhausts its restart budget.
inline Ec3Instance generate_instance(int n, std::uint64_t seed,
                                     const GenerateLimits& limits = {}) {
    if (n < 3) {
        throw std::invalid_argument("EC3 generation needs n >= 3, got n = " + std::to_string(n));
    }
    if (n > kMaxCountBits) {
        throw ResourceLimitError(
            "generation counts satisfying assignments by enumeration; n = " + std::to_string(n) +
            " exceeds the limit of " + std::to_string(kMaxCountBits));
    }
    Prng rng(substream(seed, Stream::instance_gen));
    for (int restart = 0; restart < limits.max_restarts; ++restart) {
        Ec3Instance inst;
        inst.n = n;
        std::set<std::array<int, 3>> used;
        bool dead_end = false;
        while (!dead_end) {
            Clause cl;
            int draws = 0;
            for (;;) {
                if (++draws > limits.max_draws_per_clause) {
                    dead_end = true;
                    break;
                }
                cl.i = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
                do {
                    cl.j = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
                } while (cl.j == cl.i);
                do {
                    cl.k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
                } while (cl.k == cl.i || cl.k == cl.j);
                if (used.insert(cl.sorted()).second) {
                    break;
                }
            }
            if (dead_end) {
                break;
            }
            inst.clauses.push_back(cl);
            int count = count_satisfying(inst);
            if (count == 1) {
                return inst;
            }
            if (count == 0) {
                break;
            }
        }
    }
    throw GenerationError(
        "no uniquely satisfiable instance for n = " + std::to_string(n) + " after " +
        std::to_string(limits.max_restarts) + " restarts");
}

inline std::string serialize_instance(const Ec3Instance& inst) {
    nlohmann::ordered_json j;
    j["n"] = inst.n;
    auto& arr = j["clauses"] = nlohmann::ordered_json::array();
    for (const Clause& cl : inst.clauses) {
        arr.push_back({cl.i, cl.j, cl.k});
    }
    return j.dump(2) + "\n";
}

inline Ec3Instance parse_instance(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("instance JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("n") || !j.contains("clauses")) {
        throw ParseError("instance JSON must be an object with \"n\" and \"clauses\"");
    }
    if (!j["n"].is_number_integer()) {
        throw ParseError("instance field \"n\" must be an integer");
    }
    Ec3Instance inst;
    inst.n = j["n"].get<int>();
    if (!j["clauses"].is_array()) {
        throw ParseError("instance field \"clauses\" must be an array");
    }
    for (const auto& c : j["clauses"]) {
        if (!c.is_array() || c.size() != 3 || !c[0].is_number_integer() ||
            !c[1].is_number_integer() || !c[2].is_number_integer()) {
            throw ParseError("each clause must be an array of three integers");
        }
        inst.clauses.push_back(Clause{c[0].get<int>(), c[1].get<int>(), c[2].get<int>()});
    }
    try {
        check_instance(inst);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("instance JSON: ") + e.what());
    }
    return inst;
}

}  // namespace qaasim

#endif
