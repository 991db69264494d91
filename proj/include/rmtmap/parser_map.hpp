// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Parse-graph to parser-TCAM state table synthesis. The parse graph is
// partitioned into clusters that one parser cycle can handle (header count,
// lookahead/extraction window, lookup field budget); every unique pair of a
// cluster and an outgoing transition becomes one TCAM entry.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "rmtmap/hsl.hpp"
#include "rmtmap/ir.hpp"

namespace rmtmap {

struct Cluster {
    std::vector<std::string> members;  // node ids, in absorption order
    int total_header_bits = 0;
    int lookup_slots_used = 0;  // max lookup slots over this cluster's entries
};

struct ClusterGraph {
    ParseGraph graph;  // the clustered parse graph
    std::vector<Cluster> clusters;
    std::map<std::string, int> cluster_of;  // node id -> cluster index
};

struct LookupFieldUse {
    FieldRef field;
    int width_bits = 0;
    int slots = 0;         // ceil(width / lookup_field_width)
    bool exit_select = false;  // false: routes to the exit inside the cluster
};

struct StateTableEntry {
    int cluster = 0;
    std::string from_node;
    std::string to_node;  // kAcceptSink for accepting entries
    int to_cluster = -1;  // -1 for accept
    std::vector<LookupFieldUse> lookup;
    std::string value_hex;  // exit transition select value; empty = default
    std::string mask_hex;
    std::vector<std::string> extract_headers;  // headers deposited in this cycle
    int lookup_slots = 0;
    int lookup_bits_padded = 0;  // slots * lookup_field_width
};

struct StateTable {
    std::vector<StateTableEntry> entries;

    int entry_count() const { return static_cast<int>(entries.size()); }
};

struct CapacityVerdict {
    bool accepted = false;
    int entry_count = 0;
    int capacity = 0;
    double utilization_percent = 0.0;
    std::string reason;  // set when rejected
};

/// Greedy path-walking clustering: nodes are absorbed in topological order
/// into the cluster of their predecessors while the cluster stays within
/// the per-cycle limits. Throws RejectionError when a single node alone
/// exceeds parser capacity. The accept sink is never clustered.
ClusterGraph cluster_parse_graph(const ParseGraph &g, const ParserSpec &p);

/// One entry per unique (cluster, outgoing transition) pair, transitions to
/// the accept sink included. Intra-cluster transitions are resolved within
/// the cycle and need no entry.
StateTable emit_state_table(const ClusterGraph &cg, const ParserSpec &p);

/// Accepts iff the entry count fits the parser TCAM and every entry's
/// lookup fits the per-cycle lookup budget.
CapacityVerdict check_capacity(const StateTable &t, const ParserSpec &p);

}  // namespace rmtmap
