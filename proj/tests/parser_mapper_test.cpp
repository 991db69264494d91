// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <functional>
#include <set>

#include "rmtmap/hsl.hpp"
#include "rmtmap/parser_map.hpp"
#include "synthetic_ir.hpp"

using namespace rmtmap;

namespace {

ParseGraph make_graph(const std::vector<std::pair<std::string, int>> &nodes,
                      const std::vector<std::tuple<std::string, std::string, int>> &edges) {
    // edges: (from, to, select_width); width 0 = unconditional; to "" = accept
    ParseGraph g;
    for (const auto &[id, bits] : nodes) {
        ParseGraphNode n;
        n.id = id;
        n.header_instances = {id};
        n.total_header_bits = bits;
        g.nodes.push_back(n);
    }
    g.start_node = nodes.front().first;
    for (const auto &[from, to, width] : edges) {
        ParseGraphEdge e;
        e.from = from;
        e.to = to.empty() ? kAcceptSink : to;
        if (width > 0) {
            e.select_fields = {from + ".sel"};
            e.select_widths = {width};
            e.value_hex = "0x1";
        }
        g.edges.push_back(e);
    }
    return g;
}

// Independent minimum-entry search: enumerates every partition of the
// nodes, keeps the valid ones (single entry point, per-cycle limits,
// lookup budget, acyclic cluster graph) and minimizes the outgoing
// (cluster, edge) pair count. Mirrors the hardware constraints, not the
// heuristic.
struct ClusteringOracle {
    ParseGraph g;
    ParserSpec p;
    std::map<std::string, int> index;
    std::vector<std::set<int>> preds;

    explicit ClusteringOracle(const ParseGraph &graph, const ParserSpec &spec)
        : g(graph), p(spec) {
        for (size_t i = 0; i < g.nodes.size(); ++i) index[g.nodes[i].id] = static_cast<int>(i);
        preds.resize(g.nodes.size());
        for (const auto &e : g.edges)
            if (e.to != kAcceptSink) preds[index.at(e.to)].insert(index.at(e.from));
    }

    int slots(int width) const {
        return (width + p.lookup_field_width - 1) / p.lookup_field_width;
    }

    bool block_valid(const std::set<int> &block) const {
        if (static_cast<int>(block.size()) > p.max_headers_per_cycle) return false;
        int bits = 0;
        for (int m : block) bits += g.nodes[m].total_header_bits;
        if (bits > std::min(p.lookahead_bits, p.extraction_width_bits)) return false;
        int heads = 0;
        for (int m : block) {
            const bool internal = !preds[m].empty() &&
                                  std::includes(block.begin(), block.end(), preds[m].begin(),
                                                preds[m].end());
            if (!internal) heads++;
        }
        if (heads != 1) return false;
        // lookup budget per outgoing edge: selects along intra paths plus
        // the exit selects
        std::map<int, std::map<std::string, int>> path_fields;
        for (int m : block) path_fields[m];
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto &e : g.edges) {
                if (e.to == kAcceptSink || !block.count(index.at(e.from)) ||
                    !block.count(index.at(e.to)))
                    continue;
                auto &dst = path_fields[index.at(e.to)];
                const size_t before = dst.size();
                for (const auto &[f, w] : path_fields[index.at(e.from)]) dst[f] = w;
                for (size_t i = 0; i < e.select_fields.size(); ++i)
                    dst[e.select_fields[i]] = e.select_widths[i];
                if (dst.size() != before) changed = true;
            }
        }
        for (const auto &e : g.edges) {
            if (!block.count(index.at(e.from))) continue;
            if (e.to != kAcceptSink && block.count(index.at(e.to))) continue;
            std::map<std::string, int> fields = path_fields[index.at(e.from)];
            for (size_t i = 0; i < e.select_fields.size(); ++i)
                fields[e.select_fields[i]] = e.select_widths[i];
            int total = 0;
            for (const auto &[f, w] : fields) total += slots(w);
            if (total > p.lookup_fields_per_cycle) return false;
        }
        return true;
    }

    int entries_of(const std::vector<std::set<int>> &blocks) const {
        std::map<int, int> block_of;
        for (size_t b = 0; b < blocks.size(); ++b)
            for (int m : blocks[b]) block_of[m] = static_cast<int>(b);
        int count = 0;
        for (const auto &e : g.edges) {
            const int from = block_of.at(index.at(e.from));
            if (e.to == kAcceptSink || block_of.at(index.at(e.to)) != from) count++;
        }
        return count;
    }

    bool cluster_graph_acyclic(const std::vector<std::set<int>> &blocks) const {
        std::map<int, int> block_of;
        for (size_t b = 0; b < blocks.size(); ++b)
            for (int m : blocks[b]) block_of[m] = static_cast<int>(b);
        std::vector<std::set<int>> succ(blocks.size());
        for (const auto &e : g.edges) {
            if (e.to == kAcceptSink) continue;
            const int a = block_of.at(index.at(e.from));
            const int b = block_of.at(index.at(e.to));
            if (a != b) succ[a].insert(b);
        }
        std::vector<int> color(blocks.size(), 0);
        std::function<bool(int)> dfs = [&](int u) {
            color[u] = 1;
            for (int v : succ[u]) {
                if (color[v] == 1) return false;
                if (color[v] == 0 && !dfs(v)) return false;
            }
            color[u] = 2;
            return true;
        };
        for (size_t i = 0; i < blocks.size(); ++i)
            if (color[i] == 0 && !dfs(static_cast<int>(i))) return false;
        return true;
    }

    // Minimum entries over all valid partitions, -1 when none is valid.
    int minimum_entries() const {
        const int n = static_cast<int>(g.nodes.size());
        std::vector<std::set<int>> blocks;
        int best = -1;
        std::function<void(int)> rec = [&](int node) {
            if (node == n) {
                for (const auto &b : blocks)
                    if (!block_valid(b)) return;
                if (!cluster_graph_acyclic(blocks)) return;
                const int entries = entries_of(blocks);
                if (best < 0 || entries < best) best = entries;
                return;
            }
            const size_t existing = blocks.size();
            for (size_t bi = 0; bi < existing; ++bi) {
                blocks[bi].insert(node);
                rec(node + 1);
                blocks[bi].erase(node);
            }
            blocks.push_back({node});
            rec(node + 1);
            blocks.pop_back();
        };
        rec(0);
        return best;
    }
};

ParserSpec benchmark_parser() { return default_spec().parser; }

}  // namespace

TEST_CASE("single ethernet node forms one cluster") {
    ParseGraph g = make_graph({{"eth", 112}}, {{"eth", "", 0}});
    ClusterGraph cg = cluster_parse_graph(g, benchmark_parser());
    CHECK(cg.clusters.size() == 1);
    CHECK(cg.clusters[0].total_header_bits == 112);
}

TEST_CASE("H=1 forces singleton clusters") {
    ParserSpec p = benchmark_parser();
    p.max_headers_per_cycle = 1;
    ParseGraph g = make_graph({{"eth", 112}, {"ipv4", 160}, {"tcp", 160}, {"udp", 64}},
                              {{"eth", "ipv4", 16},
                               {"ipv4", "tcp", 8},
                               {"ipv4", "udp", 8},
                               {"tcp", "", 0},
                               {"udp", "", 0}});
    ClusterGraph cg = cluster_parse_graph(g, p);
    CHECK(cg.clusters.size() == 4);
    for (const auto &c : cg.clusters) CHECK(c.members.size() == 1);
}

TEST_CASE("eth+ipv4 merge into one cluster under the benchmark parser") {
    ParseGraph g = make_graph({{"eth", 112}, {"ipv4", 160}},
                              {{"eth", "ipv4", 16}, {"ipv4", "", 0}});
    ClusterGraph cg = cluster_parse_graph(g, benchmark_parser());
    CHECK(cg.clusters.size() == 1);
    CHECK(cg.clusters[0].members.size() == 2);
    // the exhaustive search agrees this clustering is entry-minimal
    ClusteringOracle oracle(g, benchmark_parser());
    StateTable st = emit_state_table(cg, benchmark_parser());
    CHECK(st.entry_count() == oracle.minimum_entries());
}

TEST_CASE("a node alone exceeding capacity is rejected by name") {
    ParseGraph g = make_graph({{"jumbo", 500}}, {{"jumbo", "", 0}});
    try {
        cluster_parse_graph(g, benchmark_parser());
        FAIL("expected rejection");
    } catch (const RejectionError &e) {
        CHECK(std::string(e.what()).find("jumbo") != std::string::npos);
        CHECK(e.phase() == "parser");
    }
}

TEST_CASE("one cluster with one accepting edge yields one entry") {
    ParseGraph g = make_graph({{"eth", 112}}, {{"eth", "", 0}});
    ClusterGraph cg = cluster_parse_graph(g, benchmark_parser());
    StateTable st = emit_state_table(cg, benchmark_parser());
    CHECK(st.entry_count() == 1);
    CHECK(st.entries[0].to_node == kAcceptSink);
}

TEST_CASE("two clusters with three outgoing transitions each yield six entries") {
    ParserSpec p = benchmark_parser();
    p.max_headers_per_cycle = 2;
    // a+b cluster together; c+d cluster together; three transitions leave
    // each cluster.
    ParseGraph g = make_graph(
        {{"a", 64}, {"b", 64}, {"c", 64}, {"d", 64}},
        {{"a", "b", 8},          // intra cluster 1
         {"a", "c", 8},          // out 1
         {"b", "c", 8},          // out 2
         {"b", "", 0},           // out 3
         {"c", "d", 8},          // intra cluster 2
         {"c", "", 0},           // out 1
         {"d", "", 0}});         // out 2
    // c has preds {a, b} in cluster 1: it cannot join them, so it seeds
    // cluster 2 and absorbs d. One more outgoing edge from cluster 2:
    ParseGraph g2 = g;
    g2.edges.push_back([] {
        ParseGraphEdge e;
        e.from = "d";
        e.to = kAcceptSink;
        e.select_fields = {"d.sel"};
        e.select_widths = {8};
        e.value_hex = "0x2";
        return e;
    }());
    ClusterGraph cg = cluster_parse_graph(g2, p);
    REQUIRE(cg.clusters.size() == 2);
    StateTable st = emit_state_table(cg, p);
    CHECK(st.entry_count() == 6);
}

TEST_CASE("capacity verdicts at the boundary") {
    ParserSpec p = benchmark_parser();
    StateTable st;
    st.entries.resize(256);
    CHECK(check_capacity(st, p).accepted);
    st.entries.resize(257);
    CHECK_FALSE(check_capacity(st, p).accepted);
    st.entries.resize(22);
    CapacityVerdict v = check_capacity(st, p);
    CHECK(v.accepted);
    CHECK(v.utilization_percent == doctest::Approx(8.59).epsilon(0.01));
    CHECK(v.utilization_percent < 9.0);
}

TEST_CASE("property: clusters partition the node set and the entry-count law holds") {
    synth::Rng rng(0x7a25e12ull);
    for (int iter = 0; iter < 60; ++iter) {
        const int n = rng.range(2, 8);
        std::vector<std::pair<std::string, int>> nodes;
        for (int i = 0; i < n; ++i)
            nodes.push_back({"n" + std::to_string(i), rng.range(2, 24) * 8});
        std::vector<std::tuple<std::string, std::string, int>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.below(100) < 30)
                    edges.push_back({"n" + std::to_string(i), "n" + std::to_string(j),
                                     rng.below(2) ? 16 : 8});
        for (int i = 0; i < n; ++i)
            if (rng.below(100) < 60) edges.push_back({"n" + std::to_string(i), "", 0});
        if (edges.empty()) edges.push_back({"n0", "", 0});

        ParseGraph g = make_graph(nodes, edges);
        ClusterGraph cg;
        try {
            cg = cluster_parse_graph(g, benchmark_parser());
        } catch (const RejectionError &) {
            continue;
        }
        // partition property
        std::set<std::string> seen;
        for (const auto &c : cg.clusters)
            for (const auto &m : c.members) CHECK(seen.insert(m).second);
        CHECK(seen.size() == g.nodes.size());
        // entry-count law: one entry per unique (cluster, outgoing edge)
        StateTable st = emit_state_table(cg, benchmark_parser());
        int expect = 0;
        for (const auto &e : g.edges) {
            const int cf = cg.cluster_of.at(e.from);
            if (e.to == kAcceptSink || cg.cluster_of.at(e.to) != cf) expect++;
        }
        CHECK(st.entry_count() == expect);
        // capacity monotonicity
        ParserSpec small = benchmark_parser();
        small.tcam_entries = std::max(1, st.entry_count() - 1 + static_cast<int>(rng.below(3)));
        ParserSpec big = small;
        big.tcam_entries += 10;
        if (check_capacity(st, small).accepted) CHECK(check_capacity(st, big).accepted);
    }
}

TEST_CASE("oracle bound: heuristic entries within 2x of the exhaustive minimum") {
    synth::Rng rng(0x0c0ffeeull);
    int compared = 0;
    for (int iter = 0; iter < 40; ++iter) {
        const int n = rng.range(2, 8);
        std::vector<std::pair<std::string, int>> nodes;
        for (int i = 0; i < n; ++i)
            nodes.push_back({"n" + std::to_string(i), rng.range(4, 20) * 8});
        std::vector<std::tuple<std::string, std::string, int>> edges;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j)
                if (rng.below(100) < 40)
                    edges.push_back({"n" + std::to_string(i), "n" + std::to_string(j), 16});
            edges.push_back({"n" + std::to_string(i), "", 0});
        }
        ParseGraph g = make_graph(nodes, edges);
        ClusterGraph cg;
        try {
            cg = cluster_parse_graph(g, benchmark_parser());
        } catch (const RejectionError &) {
            continue;
        }
        StateTable st = emit_state_table(cg, benchmark_parser());
        ClusteringOracle oracle(g, benchmark_parser());
        const int best = oracle.minimum_entries();
        REQUIRE(best >= 0);
        CHECK(st.entry_count() <= 2 * best);
        compared++;
    }
    CHECK(compared >= 20);
}

TEST_CASE("wide select fields split across lookup slots") {
    // a 32-bit select under 16-bit lookup values takes 2 slots and fits;
    // a 40-bit select would take 3 of the 2 available slots and rejects.
    ParseGraph ok = make_graph({{"a", 64}, {"b", 64}}, {{"a", "b", 32}, {"b", "", 0}});
    ClusterGraph cg = cluster_parse_graph(ok, benchmark_parser());
    StateTable st = emit_state_table(cg, benchmark_parser());
    bool saw_split = false;
    for (const auto &e : st.entries)
        for (const auto &l : e.lookup)
            if (l.width_bits == 32) {
                CHECK(l.slots == 2);
                saw_split = true;
            }
    CHECK(saw_split);
    CHECK(check_capacity(st, benchmark_parser()).accepted);

    ParseGraph wide = make_graph({{"a", 64}, {"b", 64}}, {{"a", "b", 40}, {"b", "", 0}});
    try {
        cluster_parse_graph(wide, benchmark_parser());
        FAIL("expected rejection");
    } catch (const RejectionError &e) {
        CHECK(e.resource() == "lookup-fields");
        CHECK(std::string(e.what()).find("a") != std::string::npos);
    }
}
