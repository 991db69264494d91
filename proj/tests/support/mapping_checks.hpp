// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Independent validity checks for placements: per-stage resource limits
// and dependency-ordering constraints, recomputed from the mapping alone.
#pragma once

#include <string>
#include <vector>

#include "rmtmap/tdg_map.hpp"

namespace synth {

inline std::vector<std::string> mapping_violations(const rmtmap::StrictDag &dag,
                                                   const rmtmap::TdgMapping &m,
                                                   const rmtmap::HardwareSpec &spec) {
    std::vector<std::string> out;
    auto fail = [&](const std::string &msg) { out.push_back(msg); };

    // Per-stage totals within the stage limits, recomputed from the shares.
    std::vector<rmtmap::MemoryFootprint> per_stage(spec.num_stages);
    for (const auto &p : m.placements)
        for (const auto &share : p.shares) {
            if (share.stage < 0 || share.stage >= spec.num_stages) {
                fail("table '" + p.table + "' placed outside the pipeline");
                continue;
            }
            per_stage[share.stage] += share.footprint;
        }
    for (int s = 0; s < spec.num_stages; ++s) {
        const auto &fp = per_stage[s];
        const auto &st = spec.stage;
        if (fp.tcam_blocks > st.tcam_blocks)
            fail("stage " + std::to_string(s) + ": tcam blocks over limit");
        if (st.partitions) {
            if (fp.sram_match_blocks > st.partitions->match_blocks)
                fail("stage " + std::to_string(s) + ": sram match blocks over limit");
            if (fp.sram_action_blocks > st.partitions->action_blocks)
                fail("stage " + std::to_string(s) + ": sram action blocks over limit");
            if (fp.sram_stateful_blocks > st.partitions->stateful_blocks)
                fail("stage " + std::to_string(s) + ": sram stateful blocks over limit");
        } else if (fp.sram_total() > st.sram_blocks) {
            fail("stage " + std::to_string(s) + ": sram blocks over limit");
        }
        if (fp.vliw_slots > st.vliw_slots)
            fail("stage " + std::to_string(s) + ": vliw slots over limit");
        if (fp.tcam_crossbar_bits > st.tcam_crossbar_bits)
            fail("stage " + std::to_string(s) + ": tcam crossbar over limit");
        if (fp.sram_crossbar_bits > st.sram_crossbar_bits)
            fail("stage " + std::to_string(s) + ": sram crossbar over limit");
        if (fp.action_crossbar_bits > st.action_crossbar_bits)
            fail("stage " + std::to_string(s) + ": action crossbar over limit");
    }

    // Placement shape: every table fully placed on consecutive stages.
    for (size_t i = 0; i < m.placements.size(); ++i) {
        const auto &p = m.placements[i];
        if (p.shares.empty()) {
            fail("table '" + dag.tables[i].name + "' not placed");
            continue;
        }
        long long entries = 0;
        for (size_t k = 0; k < p.shares.size(); ++k) {
            entries += p.shares[k].entries_sram + p.shares[k].entries_tcam;
            if (k > 0 && p.shares[k].stage != p.shares[k - 1].stage + 1)
                fail("table '" + p.table + "' not on consecutive stages");
        }
        if (entries < dag.tables[i].max_entries)
            fail("table '" + p.table + "' placed fewer entries than required");
    }

    // Ordering constraints along the reduced edges.
    for (const auto &e : dag.edges) {
        const auto &u = m.placements[e.from];
        const auto &v = m.placements[e.to];
        if (u.shares.empty() || v.shares.empty()) continue;
        if (rmtmap::is_strict(e.kind)) {
            if (!(u.last_stage < v.first_stage))
                fail("strict edge " + u.table + "->" + v.table + " not stage-ordered");
        } else {
            if (!(u.last_stage <= v.first_stage))
                fail("weak edge " + u.table + "->" + v.table + " not stage-ordered");
        }
    }

    // Stateful co-location groups share one stage.
    for (const auto &group : dag.stateful_groups) {
        int stage = -1;
        for (int ti : group) {
            const auto &p = m.placements[ti];
            if (p.shares.empty()) continue;
            if (p.first_stage != p.last_stage)
                fail("stateful table '" + p.table + "' spans stages");
            if (stage < 0) stage = p.first_stage;
            else if (stage != p.first_stage)
                fail("stateful group not co-located");
        }
    }
    return out;
}

}  // namespace synth
