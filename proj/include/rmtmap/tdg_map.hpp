// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Logical-to-physical table mapping: dependency reduction, level
// generation, greedy stage placement with TCAM/SRAM block accounting and
// word packing, and the latency estimate.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "rmtmap/hsl.hpp"
#include "rmtmap/ir.hpp"

namespace rmtmap {

struct StrictEdge {
    int from = 0;
    int to = 0;
    DependencyKind kind = DependencyKind::None;
};

/// The TDG after reduction: one edge per related ordered pair, carrying
/// the strictest detected kind.
struct StrictDag {
    std::string pipeline;
    std::vector<LogicalTable> tables;
    std::vector<StrictEdge> edges;
    std::vector<std::set<int>> stateful_groups;
    std::map<std::string, std::set<int>> extern_users;
};

struct LevelAssignment {
    std::vector<int> level;  // indexed by table
    int max_level = 0;
};

struct MemoryFootprint {
    int tcam_blocks = 0;
    int sram_match_blocks = 0;
    int sram_action_blocks = 0;
    int sram_stateful_blocks = 0;
    int vliw_slots = 0;
    int tcam_crossbar_bits = 0;
    int sram_crossbar_bits = 0;
    int action_crossbar_bits = 0;

    int sram_total() const { return sram_match_blocks + sram_action_blocks + sram_stateful_blocks; }
    MemoryFootprint &operator+=(const MemoryFootprint &o);
};

struct StageShare {
    int stage = 0;
    long long entries_sram = 0;
    long long entries_tcam = 0;
    MemoryFootprint footprint;
};

struct TablePlacement {
    std::string table;
    int first_stage = 0;
    int last_stage = 0;
    std::vector<StageShare> shares;  // one per occupied stage, consecutive
};

struct TdgMapping {
    std::string pipeline;
    std::vector<TablePlacement> placements;   // indexed like StrictDag::tables
    std::vector<MemoryFootprint> per_stage;   // indexed by stage, full pipeline length
    std::set<int> occupied_stages;
    int stages_used = 0;
    long long latency_cycles = 0;
};

enum class ActionEntryMode { PerEntry, Fixed };

struct ActionModeSpec {
    ActionEntryMode mode = ActionEntryMode::PerEntry;
    long long fixed_entries = 0;  // used when mode == Fixed
};

struct LatencyCosts {
    int base = 12;
    int match = 12;
    int action = 3;
    int other = 1;  // successor, reverse-match, none
};

enum class StatefulPolicy { Colocate, Serialize };

struct MapperOptions {
    int packing_factor = 0;  // 0 = take the hardware spec's value
    ActionModeSpec action_mode;
    std::map<std::string, ActionModeSpec> per_table_action_mode;
    int match_pointer_overhead_bits = 16;
    LatencyCosts latency;
    StatefulPolicy stateful_policy = StatefulPolicy::Colocate;
};

/// Collapses each related pair to its strictest dependency kind.
StrictDag reduce_dependencies(const Tdg &tdg);

/// Resolves stateful sharing. Colocate keeps the groups for the placer to
/// pin into one stage. Serialize drops the groups and instead chains the
/// sharing tables with action-strength edges in tdg_order; rejects when
/// such a chain would contradict the existing control flow.
StrictDag apply_stateful_policy(const StrictDag &dag, StatefulPolicy policy);

/// level(v) = max(0, max over match/action preds u of level(u)+1,
///                max over successor/reverse-match preds u of level(u)).
LevelAssignment assign_levels(const StrictDag &dag);

/// ceil(total match width / tcam_width) * ceil(max_entries / tcam_depth).
/// Zero for tables with no match fields.
int tcam_blocks_needed(const LogicalTable &table, const StageSpec &s,
                       const std::map<FieldRef, HeaderField> &fields);

/// Whole-table SRAM sizing: match entries packed into units of up to
/// packing_factor adjacent blocks (match blocks way-inflated to a multiple
/// of hash_ways), action entries packed likewise, stateful blocks for every
/// extern the table references. Throws RejectionError when one match entry
/// is wider than a full packing unit.
MemoryFootprint sram_blocks_needed(const LogicalTable &table, const StageSpec &s,
                                   int packing_factor, const ActionModeSpec &action_mode,
                                   const std::map<FieldRef, HeaderField> &fields,
                                   const std::map<std::string, ExternObject> &externs,
                                   int pointer_overhead_bits = 16);

/// Residual per-stage capacity. Shared across pipelines so that ingress and
/// egress draw from the same physical inventory.
class PipelineBudget {
  public:
    explicit PipelineBudget(const HardwareSpec &spec);

    struct Stage {
        long long tcam_blocks = 0;
        long long sram_match_blocks = 0;    // partitioned mode
        long long sram_action_blocks = 0;   // partitioned mode
        long long sram_stateful_blocks = 0; // partitioned mode
        long long sram_shared_blocks = 0;   // shared mode
        bool shared = true;
        int vliw_slots = 0;
        long long tcam_crossbar_bits = 0;
        long long sram_crossbar_bits = 0;
        long long action_crossbar_bits = 0;
    };

    std::vector<Stage> stages;
};

/// Greedy placement: levels ascending; within a level non-exact tables
/// first (they claim TCAM), then exact tables into SRAM hash units with
/// TCAM spill, ties by tdg_order. A table that overflows a stage continues
/// into consecutive stages; stateful co-location groups are pinned to a
/// single stage. Throws RejectionError ("tdg", resource, table) when a
/// table cannot be placed within the pipeline.
TdgMapping place_tables(const StrictDag &dag, const LevelAssignment &levels,
                        const HardwareSpec &spec, const std::map<FieldRef, HeaderField> &fields,
                        const std::map<std::string, ExternObject> &externs,
                        const MapperOptions &opts, PipelineBudget *budget = nullptr);

/// base cost plus, for every consecutive pair of occupied stages, the cost
/// of the strictest dependency kind crossing that boundary.
long long compute_latency(const TdgMapping &m, const StrictDag &dag, const LatencyCosts &costs);

struct StageUtilizationRow {
    int stage = 0;
    MemoryFootprint footprint;
    std::vector<std::string> tables;
};

struct UtilizationSummary {
    std::vector<StageUtilizationRow> rows;  // occupied stages only
    MemoryFootprint totals;
    int stages_used = 0;
    long long latency_cycles = 0;
};

UtilizationSummary summarize(const TdgMapping &m);

}  // namespace rmtmap
