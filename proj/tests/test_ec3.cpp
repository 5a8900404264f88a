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

#include "qaasim/ec3.hpp"

#include <algorithm>
#include <set>

#include <catch2/catch_amalgamated.hpp>

using namespace qaasim;

namespace {

Ec3Instance four_bit() {
    return Ec3Instance{4, {{1, 2, 3}, {1, 3, 4}, {3, 1, 4}, {1, 2, 3}, {1, 2, 4}}};
}

Ec3Instance six_bit() {
    return Ec3Instance{6, {{1, 3, 6}, {2, 4, 5}, {3, 5, 6}, {1, 2, 3}, {3, 4, 6}}};
}

}  // namespace

TEST_CASE("objective on reference instances", "[ec3]") {
    Ec3Instance inst = six_bit();
    CHECK(objective(inst, Assignment{0, 1, 0, 0, 0, 1}) == 0);
    CHECK(objective(inst, Assignment{0, 0, 0, 0, 0, 0}) == 5);
    CHECK(objective(four_bit(), Assignment{1, 1, 1, 1}) == 20);
    CHECK(objective(four_bit(), Assignment{1, 0, 0, 0}) == 0);
}

TEST_CASE("objective rejects length mismatch", "[ec3]") {
    CHECK_THROWS_AS(objective(six_bit(), Assignment{0, 1, 0}), std::invalid_argument);
}

TEST_CASE("objective is invariant under index order within a clause", "[ec3]") {
    Ec3Instance a{5, {{1, 4, 5}, {2, 3, 4}}};
    Ec3Instance b{5, {{5, 1, 4}, {4, 2, 3}}};
    for (std::uint64_t idx = 0; idx < 32; ++idx) {
        Assignment x = assignment_from_index(5, idx);
        CHECK(objective(a, x) == objective(b, x));
    }
}

TEST_CASE("count_satisfying on reference instances", "[ec3]") {
    CHECK(count_satisfying(six_bit()) == 1);
    CHECK(count_satisfying(four_bit()) == 1);
    CHECK(count_satisfying(Ec3Instance{3, {{1, 2, 3}}}) == 3);
    CHECK(count_satisfying(Ec3Instance{3, {}}) == 8);
}

TEST_CASE("count_satisfying agrees with objective zeros", "[ec3]") {
    Ec3Instance inst = six_bit();
    int zeros = 0;
    for (std::uint64_t idx = 0; idx < 64; ++idx) {
        zeros += objective(inst, assignment_from_index(6, idx)) == 0 ? 1 : 0;
    }
    CHECK(count_satisfying(inst) == zeros);
}

TEST_CASE("unique satisfying assignments of the reference instances", "[ec3]") {
    CHECK(unique_satisfying_index(four_bit()) == 1);
    CHECK(assignment_string(assignment_from_index(4, 1)) == "1000");
    CHECK(unique_satisfying_index(six_bit()) == 34);
    CHECK(assignment_string(assignment_from_index(6, 34)) == "010001");
}

TEST_CASE("index round trip and bit order", "[ec3]") {
    for (std::uint64_t idx = 0; idx < 16; ++idx) {
        CHECK(index_of_assignment(assignment_from_index(4, idx)) == idx);
    }
    // x_1 is the least significant bit and leads the display string.
    Assignment x{1, 0, 0};
    CHECK(index_of_assignment(x) == 1);
    CHECK(assignment_string(x) == "100");
}

TEST_CASE("generate produces uniquely satisfiable instances", "[ec3]") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        Ec3Instance inst = generate_instance(6, seed);
        CHECK(count_satisfying(inst) == 1);
        std::set<std::array<int, 3>> sets;
        for (const Clause& cl : inst.clauses) {
            CHECK(sets.insert(cl.sorted()).second);
        }
    }
    for (int n = 4; n <= 8; ++n) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            Ec3Instance inst = generate_instance(n, seed);
            REQUIRE(count_satisfying(inst) == 1);
            Assignment best = assignment_from_index(n, unique_satisfying_index(inst));
            CHECK(objective(inst, best) == 0);
        }
    }
}

TEST_CASE("generate is deterministic in the seed", "[ec3]") {
    Ec3Instance a = generate_instance(6, 42);
    Ec3Instance b = generate_instance(6, 42);
    CHECK(serialize_instance(a) == serialize_instance(b));
    Ec3Instance c = generate_instance(6, 43);
    CHECK(serialize_instance(a) != serialize_instance(c));
}

TEST_CASE("generate rejects or exhausts impossible sizes", "[ec3]") {
    CHECK_THROWS_AS(generate_instance(2, 1), std::invalid_argument);
    // n = 3 admits only the clause {1,2,3}, which leaves 3 satisfying
    // assignments, so uniqueness is unreachable.
    CHECK_THROWS_AS(generate_instance(3, 1, GenerateLimits{50, 50}), GenerationError);
}

TEST_CASE("serialize and parse round trip", "[ec3]") {
    Ec3Instance inst = four_bit();
    Ec3Instance back = parse_instance(serialize_instance(inst));
    REQUIRE(back.n == 4);
    REQUIRE(back.clauses.size() == 5);
    // Clause order and orientation are preserved, including (3,1,4).
    CHECK(back.clauses[2].i == 3);
    CHECK(back.clauses[2].j == 1);
    CHECK(back.clauses[2].k == 4);
    CHECK(serialize_instance(back) == serialize_instance(inst));
}

TEST_CASE("parse rejects malformed input", "[ec3]") {
    CHECK_THROWS_AS(parse_instance("not json"), ParseError);
    CHECK_THROWS_AS(parse_instance("{\"n\": 4}"), ParseError);
    CHECK_THROWS_AS(parse_instance("{\"n\": 4, \"clauses\": [[0, 1, 2]]}"), ParseError);
    CHECK_THROWS_AS(parse_instance("{\"n\": 4, \"clauses\": [[1, 1, 2]]}"), ParseError);
    CHECK_THROWS_AS(parse_instance("{\"n\": 4, \"clauses\": [[1, 2, 5]]}"), ParseError);
    CHECK_THROWS_AS(parse_instance("{\"n\": 2, \"clauses\": []}"), ParseError);
    CHECK_THROWS_AS(parse_instance("{\"n\": 4, \"clauses\": [[1, 2]]}"), ParseError);
}

TEST_CASE("parse accepts duplicate clause sets from files", "[ec3]") {
    // The generator never repeats an index-set, but instances on disk may.
    Ec3Instance inst = parse_instance("{\"n\": 4, \"clauses\": [[1,2,3],[3,2,1]]}");
    CHECK(inst.clauses.size() == 2);
}
