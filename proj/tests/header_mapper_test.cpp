// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "rmtmap/header_map.hpp"
#include "synthetic_ir.hpp"

using namespace rmtmap;

namespace {

std::vector<HeaderField> make_fields(const std::vector<int> &widths) {
    std::vector<HeaderField> out;
    for (size_t i = 0; i < widths.size(); ++i)
        out.push_back({"f" + std::to_string(i), "h", widths[i], false});
    return out;
}

PhvSpec phv_of(std::vector<PhvContainerClass> classes) {
    PhvSpec phv;
    phv.container_classes = std::move(classes);
    return phv;
}

}  // namespace

TEST_CASE("48-bit field covers exactly with 32+16") {
    HeaderMapping m = map_headers(make_fields({48}), phv_of({{8, 8}, {16, 8}, {32, 8}}));
    REQUIRE(m.assignments.size() == 1);
    CHECK(m.allocated_bits == 48);
    CHECK(m.used_bits == 48);
    CHECK(waste_percent(m) == doctest::Approx(0.0));
    REQUIRE(m.assignments[0].containers.size() == 2);
    CHECK(m.assignments[0].containers[0].width_bits == 32);
    CHECK(m.assignments[0].containers[1].width_bits == 16);
}

TEST_CASE("20-bit field takes 16+8 and wastes 4 bits") {
    HeaderMapping m = map_headers(make_fields({20}), phv_of({{8, 8}, {16, 8}, {32, 8}}));
    CHECK(m.allocated_bits == 24);
    CHECK(m.used_bits == 20);
    REQUIRE(m.assignments[0].containers.size() == 2);
    CHECK(m.assignments[0].containers[0].width_bits == 16);
    CHECK(m.assignments[0].containers[1].width_bits == 8);
}

TEST_CASE("two 33-bit fields reject when only 32x2 + 8x1 are available") {
    CHECK_THROWS_AS(map_headers(make_fields({33, 33}), phv_of({{32, 2}, {8, 1}})),
                    RejectionError);
    // The oracle agrees the instance is infeasible.
    CHECK_FALSE(brute_force_header_map(make_fields({33, 33}), phv_of({{32, 2}, {8, 1}}))
                    .has_value());
}

TEST_CASE("rejection names the unplaced field") {
    try {
        map_headers(make_fields({33, 33}), phv_of({{32, 2}, {8, 1}}));
        FAIL("expected rejection");
    } catch (const RejectionError &e) {
        CHECK(e.phase() == "phv");
        CHECK(std::string(e.what()).find("h.f") != std::string::npos);
    }
}

TEST_CASE("waste formula reproduces the reported percentages") {
    HeaderMapping m;
    m.used_bits = 1288;
    m.allocated_bits = 1432;
    CHECK(waste_percent(m) == doctest::Approx(10.05).epsilon(0.002));
    m.used_bits = 1976;
    m.allocated_bits = 2112;
    CHECK(waste_percent(m) == doctest::Approx(6.43).epsilon(0.002));
    m.used_bits = 100;
    m.allocated_bits = 100;
    CHECK(waste_percent(m) == doctest::Approx(0.0));
}

TEST_CASE("oracle: exact cover instances") {
    CHECK(brute_force_header_map(make_fields({48}), phv_of({{8, 2}, {16, 2}, {32, 2}})) == 48);
    CHECK(brute_force_header_map(make_fields({20}), phv_of({{16, 1}, {8, 1}})) == 24);
}

TEST_CASE("oracle rejects instances beyond its bounds") {
    CHECK_THROWS_AS(brute_force_header_map(make_fields({8, 8, 8, 8, 8, 8, 8}),
                                           phv_of({{8, 8}})),
                    std::invalid_argument);
    CHECK_THROWS_AS(brute_force_header_map(make_fields({8}), phv_of({{8, 9}})),
                    std::invalid_argument);
}

TEST_CASE("determinism: identical inputs give identical assignments") {
    const auto fields = make_fields({48, 20, 16, 16, 8, 9});
    const auto phv = phv_of({{8, 16}, {16, 16}, {32, 16}});
    HeaderMapping a = map_headers(fields, phv);
    HeaderMapping b = map_headers(fields, phv);
    REQUIRE(a.assignments.size() == b.assignments.size());
    CHECK(a.allocated_bits == b.allocated_bits);
    for (size_t i = 0; i < a.assignments.size(); ++i) {
        CHECK(a.assignments[i].field == b.assignments[i].field);
        CHECK(a.assignments[i].allocated_bits() == b.assignments[i].allocated_bits());
    }
}

TEST_CASE("soundness on random small instances: success implies oracle feasibility") {
    synth::Rng rng(0xabcdef12345ull);
    static const int kWidths[] = {4, 8, 9, 16, 17, 20, 24, 32, 33, 48};
    int successes = 0;
    for (int iter = 0; iter < 300; ++iter) {
        const int nfields = rng.range(1, 4);
        std::vector<int> widths;
        for (int i = 0; i < nfields; ++i) widths.push_back(kWidths[rng.below(10)]);
        const int c8 = rng.range(0, 3);
        const int c16 = rng.range(0, 3);
        const int c32 = rng.range(0, 2);
        if (c8 + c16 + c32 == 0) continue;
        const auto fields = make_fields(widths);
        const auto phv = phv_of({{8, c8}, {16, c16}, {32, c32}});
        bool heuristic_ok = true;
        HeaderMapping m;
        try {
            m = map_headers(fields, phv);
        } catch (const RejectionError &) {
            heuristic_ok = false;
        }
        auto oracle = brute_force_header_map(fields, phv);
        if (heuristic_ok) {
            successes++;
            REQUIRE(oracle.has_value());
            CHECK(m.allocated_bits >= *oracle);
            // every field covered, no class over-consumed
            int per_class[3] = {0, 0, 0};
            for (const auto &a : m.assignments) {
                CHECK(a.allocated_bits() >= a.field_bits);
                for (const auto &c : a.containers) {
                    if (c.width_bits == 8) per_class[0] += c.count;
                    if (c.width_bits == 16) per_class[1] += c.count;
                    if (c.width_bits == 32) per_class[2] += c.count;
                }
            }
            CHECK(per_class[0] <= c8);
            CHECK(per_class[1] <= c16);
            CHECK(per_class[2] <= c32);
        }
    }
    CHECK(successes > 50);  // the family is not vacuous
}

TEST_CASE("waste is zero iff every field covers exactly") {
    HeaderMapping exact = map_headers(make_fields({32, 16, 8}), phv_of({{8, 4}, {16, 4}, {32, 4}}));
    CHECK(waste_percent(exact) == doctest::Approx(0.0));
    HeaderMapping padded = map_headers(make_fields({20}), phv_of({{8, 4}, {16, 4}, {32, 4}}));
    CHECK(waste_percent(padded) > 0.0);
}
