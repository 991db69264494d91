// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Hardware specification language (HSL): a JSON document describing the
// resources of one V1Model switch. Widths are in bits, depths in entries,
// memories in blocks. See docs/hsl_schema.md for the full schema.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmtmap/diagnostics.hpp"

namespace rmtmap {

struct ParserSpec {
    int lookahead_bits = 0;             // window the header identification unit sees per cycle
    int max_headers_per_cycle = 0;      // headers identified per cycle
    int tcam_entries = 0;               // state table capacity
    int tcam_entry_width = 0;           // bits per state-table entry (state id + lookup values)
    int lookup_fields_per_cycle = 0;    // lookup field values matched per cycle
    int lookup_field_width = 0;         // bits per lookup field value
    int extraction_width_bits = 0;      // header data deposited per cycle
};

struct PhvContainerClass {
    int width_bits = 0;
    int count = 0;
};

struct PhvSpec {
    std::vector<PhvContainerClass> container_classes;

    int total_bits() const {
        int sum = 0;
        for (const auto &c : container_classes) sum += c.width_bits * c.count;
        return sum;
    }
};

/// SRAM partition sizes. When absent the stage draws match, action and
/// stateful blocks from one shared pool.
struct SramPartitions {
    int match_blocks = 0;
    int action_blocks = 0;
    int stateful_blocks = 0;
};

struct StageSpec {
    int tcam_blocks = 0;
    int tcam_width = 0;
    int tcam_depth = 0;
    int sram_blocks = 0;
    int sram_width = 0;
    int sram_depth = 0;
    std::optional<SramPartitions> partitions;  // nullopt = shared pool
    int tcam_crossbar_bits = 0;
    int sram_crossbar_bits = 0;
    int action_crossbar_bits = 0;
    int vliw_slots = 0;
    int hash_ways = 1;
    int memory_ports = 0;
    int memory_port_width = 0;
    // Per-stage extern execution units by kind; empty map = unconstrained.
    std::vector<std::pair<std::string, int>> extern_units;
};

struct HardwareSpec {
    int hsl_version = 1;
    std::string name;
    int num_stages = 0;
    int packing_factor = 1;
    ParserSpec parser;
    PhvSpec phv;
    StageSpec stage;
};

/// Parses an HSL document. Missing optional keys take their documented
/// defaults; unknown keys produce warnings. Throws InputError when a
/// mandatory field is absent or the document is malformed.
HardwareSpec parse_hsl(const std::string &document, Diagnostics *diags = nullptr);

/// Checks every type invariant; returns one diagnostic per violation.
Diagnostics validate_spec(const HardwareSpec &spec);

/// The bundled benchmark profile: the RMT switch design this backend
/// targets by default (32 stages, 4096-bit PHV, 256x40b parser TCAM,
/// 16x 2048x40b TCAM and 106x 1000x112b SRAM blocks per stage).
HardwareSpec default_spec();

/// Serializes a spec back to its HSL document form. parse_hsl(serialize_hsl(s))
/// reproduces s exactly.
std::string serialize_hsl(const HardwareSpec &spec);

}  // namespace rmtmap
