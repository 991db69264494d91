// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one line per criterion, nonzero exit when any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "mapping_checks.hpp"
#include "rmtmap/header_map.hpp"
#include "rmtmap/parser_map.hpp"
#include "rmtmap/report.hpp"
#include "rmtmap/tdg_map.hpp"
#include "synthetic_ir.hpp"

using namespace rmtmap;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string &detail) {
    if (!ok) failures++;
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixture_path(const std::string &rel) {
    return std::string(RMTMAP_FIXTURE_DIR) + "/" + rel;
}

std::string slurp(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- criterion 1: waste formula against the reported program rows --------

void criterion_1() {
    struct Row {
        const char *name;
        int used;
        int allocated;
        double reported;
    };
    const Row rows[] = {{"qos-modifier", 1288, 1432, 10.05},
                        {"traffic-anony", 1064, 1208, 11.92},
                        {"l2l3-simple", 2912, 3088, 5.69},
                        {"l2l3-complex", 1976, 2112, 6.43}};
    bool ok = true;
    std::string detail = "waste formula vs reported rows:";
    for (const auto &row : rows) {
        HeaderMapping m;
        m.used_bits = row.used;
        m.allocated_bits = row.allocated;
        const double computed = waste_percent(m);
        const double delta = std::fabs(computed - row.reported);
        ok = ok && delta <= 0.02;
        char buf[96];
        std::snprintf(buf, sizeof buf, " %s %.4f vs %.2f (d=%.4f)", row.name, computed,
                      row.reported, delta);
        detail += buf;
    }
    report(1, ok, detail);
}

// --- criterion 2: parse-entry counting on the 11-state/31-edge graph -----

void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    Diagnostics diags;
    IrProgram prog = parse_ir(slurp(fixture_path("ir/l2l3_simple.json")), &diags);
    ParseGraph g = build_parse_graph(prog, &diags);
    HardwareSpec hw = default_spec();
    ClusterGraph cg = cluster_parse_graph(g, hw.parser);
    StateTable st = emit_state_table(cg, hw.parser);
    CapacityVerdict v = check_capacity(st, hw.parser);

    int expect = 0;
    for (const auto &e : g.edges) {
        const int cf = cg.cluster_of.at(e.from);
        if (e.to == kAcceptSink || cg.cluster_of.at(e.to) != cf) expect++;
    }
    const bool graph_ok = g.nodes.size() == 11 && g.edges.size() == 31;
    const bool ok = graph_ok && v.accepted && v.entry_count <= 31 &&
                    v.utilization_percent < 13.0 && st.entry_count() == expect &&
                    seconds_since(t0) < 1.0;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "11s/31e graph -> %d entries (target 22, cap 31), %.2f%% of 256, "
                  "pair-law %s, %.2fs",
                  v.entry_count, v.utilization_percent,
                  st.entry_count() == expect ? "holds" : "violated", seconds_since(t0));
    report(2, ok, buf);
}

// --- criterion 3: level assignment equals longest strict path ------------

int longest_strict_path_to(const StrictDag &dag, int v) {
    int best = 0;
    for (const auto &e : dag.edges)
        if (e.to == v)
            best = std::max(best, longest_strict_path_to(dag, e.from) +
                                      (is_strict(e.kind) ? 1 : 0));
    return best;
}

void criterion_3() {
    const auto t0 = std::chrono::steady_clock::now();
    synth::Rng rng(0x315a7e5ull);
    int mismatches = 0;
    for (int iter = 0; iter < 1000; ++iter) {
        synth::DagFixture fx =
            synth::random_dag(rng, {static_cast<int>(2 + rng.below(11)), 30, 1024, false});
        LevelAssignment la = assign_levels(fx.dag);
        for (size_t v = 0; v < fx.dag.tables.size(); ++v)
            if (la.level[v] != longest_strict_path_to(fx.dag, static_cast<int>(v))) mismatches++;
    }
    const double secs = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "1000 random DAGs, %d label mismatches, %.2fs", mismatches,
                  secs);
    report(3, mismatches == 0 && secs < 10.0, buf);
}

// --- criterion 4: accepted placements violate nothing ---------------------

void criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    synth::Rng rng(0x4cce9f4ull);
    HardwareSpec spec = default_spec();
    int accepted = 0;
    int attempts = 0;
    int violations = 0;
    while (accepted < 500 && attempts < 5000) {
        attempts++;
        synth::DagFixture fx =
            synth::random_dag(rng, {static_cast<int>(3 + rng.below(23)), 20, 16384, true});
        LevelAssignment la;
        TdgMapping m;
        try {
            la = assign_levels(fx.dag);
            m = place_tables(fx.dag, la, spec, fx.fields, fx.externs, {});
        } catch (const RejectionError &) {
            continue;
        }
        accepted++;
        violations += static_cast<int>(synth::mapping_violations(fx.dag, m, spec).size());
    }
    const double secs = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d accepted placements (of %d programs), %d violations, %.1fs", accepted,
                  attempts, violations, secs);
    report(4, accepted == 500 && violations == 0 && secs < 60.0, buf);
}

// --- criterion 5: tiny instances, heuristic acceptance is sound ----------

void criterion_5() {
    const auto t0 = std::chrono::steady_clock::now();
    HardwareSpec spec = default_spec();
    spec.num_stages = 3;
    spec.packing_factor = 1;
    spec.stage.hash_ways = 1;
    spec.stage.sram_blocks = 2;
    spec.stage.tcam_blocks = 1;
    spec.stage.vliw_slots = 4;
    spec.stage.sram_crossbar_bits = 32;
    spec.stage.tcam_crossbar_bits = 32;
    spec.stage.action_crossbar_bits = 64;

    // Independent placement search: every assignment of tables to single
    // stages, checked against inline capacity and ordering rules.
    auto oracle_feasible = [&](const StrictDag &dag) {
        const int n = static_cast<int>(dag.tables.size());
        std::vector<int> stage(n, 0);
        std::function<bool(int)> rec = [&](int i) -> bool {
            if (i == n) {
                for (int s = 0; s < 3; ++s) {
                    int exact = 0;
                    int tern = 0;
                    for (int t = 0; t < n; ++t) {
                        if (stage[t] != s) continue;
                        if (dag.tables[t].has_non_exact_match()) tern++;
                        else exact++;
                    }
                    // 2 SRAM blocks (one per exact table), 1 TCAM block,
                    // 32b crossbars over 16b keys, 4 VLIW slots
                    if (exact > 2 || tern > 1 || exact + tern > 4) return false;
                }
                for (const auto &e : dag.edges) {
                    if (is_strict(e.kind) && !(stage[e.from] < stage[e.to])) return false;
                    if (!is_strict(e.kind) && !(stage[e.from] <= stage[e.to])) return false;
                }
                return true;
            }
            for (int s = 0; s < 3; ++s) {
                stage[i] = s;
                if (rec(i + 1)) return true;
            }
            return false;
        };
        return rec(0);
    };

    static const DependencyKind kKindChoices[] = {DependencyKind::None, DependencyKind::Match,
                                                  DependencyKind::Action,
                                                  DependencyKind::ReverseMatch,
                                                  DependencyKind::Successor};
    int instances = 0;
    int unsound = 0;
    int gap = 0;  // heuristic rejections of oracle-feasible instances
    for (int n = 1; n <= 4; ++n) {
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
        const int combos = static_cast<int>(std::pow(5.0, pairs.size()));
        for (int code = 0; code < combos; ++code) {
            synth::DagFixture fx;
            for (int i = 0; i < n; ++i) {
                synth::DagFixture::TableParams tp;
                tp.entries = 100;
                tp.key_widths = {16};
                tp.kind = i % 2 == 1 ? MatchKind::Ternary : MatchKind::Exact;
                fx.add_table("t" + std::to_string(i), tp);
            }
            int rest = code;
            for (const auto &[i, j] : pairs) {
                const DependencyKind kind = kKindChoices[rest % 5];
                rest /= 5;
                if (kind != DependencyKind::None) fx.add_edge(i, j, kind);
            }
            instances++;
            bool heuristic_ok = true;
            TdgMapping m;
            LevelAssignment la;
            try {
                la = assign_levels(fx.dag);
                m = place_tables(fx.dag, la, spec, fx.fields, fx.externs, {});
            } catch (const RejectionError &) {
                heuristic_ok = false;
            }
            const bool oracle_ok = oracle_feasible(fx.dag);
            if (heuristic_ok && !oracle_ok) unsound++;
            if (!heuristic_ok && oracle_ok) gap++;
        }
    }
    const double secs = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d instances, %d unsound acceptances, completeness gap %d, %.1fs", instances,
                  unsound, gap, secs);
    report(5, unsound == 0 && secs < 120.0, buf);
}

// --- criterion 6: knapsack heuristic vs exhaustive oracle ----------------

void criterion_6() {
    const auto t0 = std::chrono::steady_clock::now();
    static const int kWidths[] = {4, 8, 9, 16, 20, 24, 32, 33, 48};
    int instances = 0;
    int unsound = 0;
    int over_bound = 0;
    double worst_ratio = 1.0;
    std::string worst_case;

    auto run_instance = [&](const std::vector<int> &widths, int c8, int c16, int c32) {
        if (c8 + c16 + c32 == 0 || c8 + c16 + c32 > 8) return;
        instances++;
        std::vector<HeaderField> fields;
        for (size_t i = 0; i < widths.size(); ++i)
            fields.push_back({"f" + std::to_string(i), "h", widths[i], false});
        PhvSpec phv;
        phv.container_classes = {{8, c8}, {16, c16}, {32, c32}};
        bool ok = true;
        HeaderMapping m;
        try {
            m = map_headers(fields, phv);
        } catch (const RejectionError &) {
            ok = false;
        }
        if (!ok) return;
        auto best = brute_force_header_map(fields, phv);
        if (!best.has_value()) {
            unsound++;
            return;
        }
        const double ratio = static_cast<double>(m.allocated_bits) / *best;
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            std::ostringstream ss;
            ss << "widths{";
            for (size_t i = 0; i < widths.size(); ++i) ss << (i ? "," : "") << widths[i];
            ss << "} inv{8x" << c8 << ",16x" << c16 << ",32x" << c32 << "} " << m.allocated_bits
               << "b vs opt " << *best << "b";
            worst_case = ss.str();
        }
        if (m.allocated_bits > 1.5 * *best) over_bound++;
    };

    // exhaustive over <= 3 fields, full container grid
    for (int a = 0; a < 9; ++a)
        for (int b = a; b < 9; ++b)
            for (int c = b; c < 9; ++c)
                for (int c8 = 0; c8 <= 4; ++c8)
                    for (int c16 = 0; c16 <= 4; ++c16)
                        for (int c32 = 0; c32 <= 4; ++c32)
                            run_instance({kWidths[a], kWidths[b], kWidths[c]}, c8, c16, c32);
    // seeded random 4-6 field instances
    synth::Rng rng(0x6e4b5ac0ull);
    for (int iter = 0; iter < 3000; ++iter) {
        const int nf = rng.range(4, 6);
        std::vector<int> widths;
        for (int i = 0; i < nf; ++i) widths.push_back(kWidths[rng.below(9)]);
        run_instance(widths, rng.range(0, 3), rng.range(0, 3), rng.range(0, 2));
    }
    const double secs = seconds_since(t0);
    std::ostringstream detail;
    detail << instances << " instances, soundness " << (unsound == 0 ? "holds" : "VIOLATED")
           << " (" << unsound << " unsound successes), " << over_bound
           << " above 1.5x optimum (worst " << worst_ratio << ": " << worst_case << "), "
           << secs << "s";
    report(6, unsound == 0 && over_bound == 0 && secs < 60.0, detail.str());
}

// --- criterion 7: 100-node/200-edge program compiles quickly -------------

void criterion_7() {
    const std::string doc = synth::chain_program_document("scale_tdg", 100, 200, 256);
    const std::string hsl = serialize_hsl(default_spec());
    const auto t0 = std::chrono::steady_clock::now();
    MappingReport r = compile_documents(doc, hsl);
    const double secs = seconds_since(t0);
    bool shape_ok = false;
    for (const auto &p : r.pipelines)
        if (p.pipeline == "ingress") shape_ok = p.nodes == 100 && p.edges == 200;
    char buf[160];
    std::snprintf(buf, sizeof buf, "100n/200e program: %s, %d stages, %.2fs",
                  r.verdict.accepted ? "accepted" : ("rejected: " + r.verdict.reason).c_str(),
                  r.pipelines.empty() ? 0 : r.pipelines[0].stages_used, secs);
    report(7, r.verdict.accepted && shape_ok && secs < 10.0, buf);
}

// --- criterion 8: byte-identical reports on every bundled fixture --------

void criterion_8() {
    const char *fixtures[] = {"ir/qos_modifier.json", "ir/l2l3_simple.json",
                              "ir/l2l3_complex.json", "ir/traffic_anonymizer.json"};
    const std::string hw = fixture_path("hw/v1model_benchmark.json");
    bool ok = true;
    std::string detail = "byte-identical reruns:";
    for (const char *f : fixtures) {
        const std::string a = render_report(compile(fixture_path(f), hw, {}), ReportFormat::Json);
        const std::string b = render_report(compile(fixture_path(f), hw, {}), ReportFormat::Json);
        const bool same = a == b && !a.empty();
        ok = ok && same;
        detail += std::string(" ") + f + (same ? " ok" : " DIFFERS");
    }
    report(8, ok, detail);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d criteria failed\n", failures);
    return 1;
}
