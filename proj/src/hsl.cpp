// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rmtmap/hsl.hpp"

#include <set>

#include <json.hpp>

namespace rmtmap {

using json = nlohmann::ordered_json;

namespace {

void note(Diagnostics *diags, Diagnostic d) {
    if (diags) diags->push_back(std::move(d));
}

int require_int(const json &obj, const std::string &section, const char *key) {
    if (!obj.contains(key))
        throw InputError("hsl: missing mandatory field '" + section + "." + key + "'");
    const auto &v = obj.at(key);
    if (!v.is_number_integer())
        throw InputError("hsl: field '" + section + "." + key + "' must be an integer");
    return v.get<int>();
}

int optional_int(const json &obj, const char *key, int fallback) {
    if (!obj.contains(key)) return fallback;
    return obj.at(key).get<int>();
}

void warn_unknown_keys(const json &obj, const std::string &section,
                       const std::set<std::string> &known, Diagnostics *diags) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key()))
            note(diags, Diagnostic::warning("hsl: unknown key '" + section + "." + it.key() +
                                            "' ignored"));
    }
}

}  // namespace

namespace {

HardwareSpec parse_hsl_impl(const std::string &document, Diagnostics *diags) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error &e) {
        throw InputError("hsl: malformed document: " + std::string(e.what()));
    }
    if (!doc.is_object()) throw InputError("hsl: document root must be an object");

    HardwareSpec spec;
    spec.hsl_version = optional_int(doc, "hsl_version", 1);
    if (spec.hsl_version != 1)
        note(diags, Diagnostic::warning("hsl: unknown hsl_version " +
                                        std::to_string(spec.hsl_version) + ", parsing as 1"));
    spec.name = doc.value("name", std::string{});
    spec.num_stages = require_int(doc, "", "num_stages");
    spec.packing_factor = optional_int(doc, "packing_factor", 1);

    if (!doc.contains("parser")) throw InputError("hsl: missing mandatory section 'parser'");
    const json &p = doc.at("parser");
    spec.parser.lookahead_bits = require_int(p, "parser", "lookahead_bits");
    spec.parser.max_headers_per_cycle = require_int(p, "parser", "max_headers_per_cycle");
    spec.parser.tcam_entries = require_int(p, "parser", "tcam_entries");
    spec.parser.tcam_entry_width = require_int(p, "parser", "tcam_entry_width");
    spec.parser.lookup_fields_per_cycle = require_int(p, "parser", "lookup_fields_per_cycle");
    spec.parser.lookup_field_width = require_int(p, "parser", "lookup_field_width");
    spec.parser.extraction_width_bits = require_int(p, "parser", "extraction_width_bits");
    warn_unknown_keys(p, "parser",
                      {"lookahead_bits", "max_headers_per_cycle", "tcam_entries",
                       "tcam_entry_width", "lookup_fields_per_cycle", "lookup_field_width",
                       "extraction_width_bits"},
                      diags);

    if (!doc.contains("phv")) throw InputError("hsl: missing mandatory section 'phv'");
    const json &phv = doc.at("phv");
    if (!phv.contains("container_classes"))
        throw InputError("hsl: missing mandatory field 'phv.container_classes'");
    for (const auto &c : phv.at("container_classes")) {
        PhvContainerClass cls;
        cls.width_bits = require_int(c, "phv.container_classes[]", "width_bits");
        cls.count = require_int(c, "phv.container_classes[]", "count");
        spec.phv.container_classes.push_back(cls);
    }
    warn_unknown_keys(phv, "phv", {"container_classes"}, diags);

    if (!doc.contains("stage")) throw InputError("hsl: missing mandatory section 'stage'");
    const json &st = doc.at("stage");
    StageSpec &s = spec.stage;
    s.tcam_blocks = require_int(st, "stage", "tcam_blocks");
    s.tcam_width = require_int(st, "stage", "tcam_width");
    s.tcam_depth = require_int(st, "stage", "tcam_depth");
    s.sram_blocks = require_int(st, "stage", "sram_blocks");
    s.sram_width = require_int(st, "stage", "sram_width");
    s.sram_depth = require_int(st, "stage", "sram_depth");
    if (st.contains("partitions") && !st.at("partitions").is_string()) {
        const json &parts = st.at("partitions");
        SramPartitions sp;
        sp.match_blocks = require_int(parts, "stage.partitions", "match_blocks");
        sp.action_blocks = require_int(parts, "stage.partitions", "action_blocks");
        sp.stateful_blocks = require_int(parts, "stage.partitions", "stateful_blocks");
        s.partitions = sp;
    } else if (st.contains("partitions") && st.at("partitions").get<std::string>() != "shared") {
        throw InputError("hsl: stage.partitions must be \"shared\" or an object");
    }
    s.tcam_crossbar_bits = require_int(st, "stage", "tcam_crossbar_bits");
    s.sram_crossbar_bits = require_int(st, "stage", "sram_crossbar_bits");
    s.action_crossbar_bits = require_int(st, "stage", "action_crossbar_bits");
    s.vliw_slots = require_int(st, "stage", "vliw_slots");
    s.hash_ways = optional_int(st, "hash_ways", 1);
    s.memory_ports = optional_int(st, "memory_ports", 0);
    s.memory_port_width = optional_int(st, "memory_port_width", 0);
    if (st.contains("extern_units")) {
        for (auto it = st.at("extern_units").begin(); it != st.at("extern_units").end(); ++it)
            s.extern_units.emplace_back(it.key(), it.value().get<int>());
    }
    warn_unknown_keys(st, "stage",
                      {"tcam_blocks", "tcam_width", "tcam_depth", "sram_blocks", "sram_width",
                       "sram_depth", "partitions", "tcam_crossbar_bits", "sram_crossbar_bits",
                       "action_crossbar_bits", "vliw_slots", "hash_ways", "memory_ports",
                       "memory_port_width", "extern_units"},
                      diags);

    warn_unknown_keys(doc, "",
                      {"hsl_version", "name", "num_stages", "packing_factor", "parser", "phv",
                       "stage"},
                      diags);

    Diagnostics invalid = validate_spec(spec);
    for (const auto &d : invalid)
        if (d.severity == Severity::Error) throw InputError("hsl: " + d.message);
    if (diags) diags->insert(diags->end(), invalid.begin(), invalid.end());
    return spec;
}

}  // namespace

HardwareSpec parse_hsl(const std::string &document, Diagnostics *diags) {
    try {
        return parse_hsl_impl(document, diags);
    } catch (const json::exception &e) {
        throw InputError("hsl: malformed document: " + std::string(e.what()));
    }
}

Diagnostics validate_spec(const HardwareSpec &spec) {
    Diagnostics diags;
    auto bad = [&](const std::string &msg) { diags.push_back(Diagnostic::error(msg)); };

    if (spec.num_stages < 1) bad("num_stages must be >= 1");
    if (spec.packing_factor < 1) bad("packing_factor must be >= 1");

    const ParserSpec &p = spec.parser;
    if (p.lookahead_bits < 1) bad("parser.lookahead_bits must be >= 1");
    if (p.max_headers_per_cycle < 1) bad("parser.max_headers_per_cycle must be >= 1");
    if (p.tcam_entries < 1) bad("parser.tcam_entries must be >= 1");
    if (p.tcam_entry_width < 1) bad("parser.tcam_entry_width must be >= 1");
    if (p.lookup_fields_per_cycle < 1) bad("parser.lookup_fields_per_cycle must be >= 1");
    if (p.lookup_field_width < 1) bad("parser.lookup_field_width must be >= 1");
    if (p.extraction_width_bits < 1) bad("parser.extraction_width_bits must be >= 1");

    std::set<int> widths;
    for (const auto &c : spec.phv.container_classes) {
        if (c.width_bits < 1) bad("phv container class width must be >= 1");
        if (c.count < 0) bad("phv container class count must be >= 0");
        if (!widths.insert(c.width_bits).second)
            bad("phv container class widths must be distinct (duplicate " +
                std::to_string(c.width_bits) + ")");
    }
    if (spec.phv.container_classes.empty()) bad("phv.container_classes must not be empty");

    const StageSpec &s = spec.stage;
    if (s.tcam_blocks < 0 || s.sram_blocks < 0) bad("stage block counts must be >= 0");
    if (s.tcam_blocks > 0 && (s.tcam_width < 1 || s.tcam_depth < 1))
        bad("stage tcam_width/tcam_depth must be >= 1 when tcam_blocks > 0");
    if (s.sram_blocks > 0 && (s.sram_width < 1 || s.sram_depth < 1))
        bad("stage sram_width/sram_depth must be >= 1 when sram_blocks > 0");
    if (s.partitions) {
        const auto &sp = *s.partitions;
        if (sp.match_blocks < 0 || sp.action_blocks < 0 || sp.stateful_blocks < 0)
            bad("stage partition block counts must be >= 0");
        if (sp.match_blocks + sp.action_blocks + sp.stateful_blocks > s.sram_blocks)
            bad("stage partition overflow: match+action+stateful blocks exceed sram_blocks");
    }
    if (s.vliw_slots < 0) bad("stage.vliw_slots must be >= 0");
    if (s.hash_ways < 1) bad("stage.hash_ways must be >= 1");
    if (s.tcam_blocks > 0 && s.tcam_crossbar_bits == 0)
        diags.push_back(Diagnostic::warning(
            "stage.tcam_crossbar_bits is 0 while tcam_blocks > 0: no field can reach the TCAM"));
    if (s.sram_blocks > 0 && s.sram_crossbar_bits == 0)
        diags.push_back(Diagnostic::warning(
            "stage.sram_crossbar_bits is 0 while sram_blocks > 0: no field can reach the SRAM"));
    if (spec.stage.extern_units.empty())
        diags.push_back(Diagnostic::info(
            "stage.extern_units not declared: extern execution units treated as unconstrained"));
    return diags;
}

HardwareSpec default_spec() {
    // Benchmark profile transcribed from the RMT switch design: 32 stages;
    // PHV of 64x8b + 96x16b + 64x32b containers (4096 bits); parser with a
    // 256x40b TCAM, 48-byte lookahead and 48-byte extraction per cycle,
    // identifying up to 4 headers per cycle; per stage 16 TCAM blocks of
    // 2048x40b, 106 SRAM blocks of 1000x112b, 640b match crossbars, a
    // 1280b action crossbar, 32 VLIW slots and 4-way cuckoo hashing.
    HardwareSpec spec;
    spec.name = "v1model-benchmark";
    spec.num_stages = 32;
    spec.packing_factor = 2;

    spec.parser.lookahead_bits = 384;
    spec.parser.max_headers_per_cycle = 4;
    spec.parser.tcam_entries = 256;
    spec.parser.tcam_entry_width = 40;
    spec.parser.lookup_fields_per_cycle = 2;
    spec.parser.lookup_field_width = 16;
    spec.parser.extraction_width_bits = 384;

    spec.phv.container_classes = {{8, 64}, {16, 96}, {32, 64}};

    spec.stage.tcam_blocks = 16;
    spec.stage.tcam_width = 40;
    spec.stage.tcam_depth = 2048;
    spec.stage.sram_blocks = 106;
    spec.stage.sram_width = 112;
    spec.stage.sram_depth = 1000;
    spec.stage.partitions = std::nullopt;  // shared pool
    spec.stage.tcam_crossbar_bits = 640;
    spec.stage.sram_crossbar_bits = 640;
    spec.stage.action_crossbar_bits = 1280;
    spec.stage.vliw_slots = 32;
    spec.stage.hash_ways = 4;
    spec.stage.memory_ports = 106;
    spec.stage.memory_port_width = 112;
    return spec;
}

std::string serialize_hsl(const HardwareSpec &spec) {
    json doc;
    doc["hsl_version"] = spec.hsl_version;
    if (!spec.name.empty()) doc["name"] = spec.name;
    doc["num_stages"] = spec.num_stages;
    doc["packing_factor"] = spec.packing_factor;

    json p;
    p["lookahead_bits"] = spec.parser.lookahead_bits;
    p["max_headers_per_cycle"] = spec.parser.max_headers_per_cycle;
    p["tcam_entries"] = spec.parser.tcam_entries;
    p["tcam_entry_width"] = spec.parser.tcam_entry_width;
    p["lookup_fields_per_cycle"] = spec.parser.lookup_fields_per_cycle;
    p["lookup_field_width"] = spec.parser.lookup_field_width;
    p["extraction_width_bits"] = spec.parser.extraction_width_bits;
    doc["parser"] = p;

    json classes = json::array();
    for (const auto &c : spec.phv.container_classes)
        classes.push_back({{"width_bits", c.width_bits}, {"count", c.count}});
    doc["phv"] = {{"container_classes", classes}};

    json st;
    st["tcam_blocks"] = spec.stage.tcam_blocks;
    st["tcam_width"] = spec.stage.tcam_width;
    st["tcam_depth"] = spec.stage.tcam_depth;
    st["sram_blocks"] = spec.stage.sram_blocks;
    st["sram_width"] = spec.stage.sram_width;
    st["sram_depth"] = spec.stage.sram_depth;
    if (spec.stage.partitions) {
        st["partitions"] = {{"match_blocks", spec.stage.partitions->match_blocks},
                            {"action_blocks", spec.stage.partitions->action_blocks},
                            {"stateful_blocks", spec.stage.partitions->stateful_blocks}};
    } else {
        st["partitions"] = "shared";
    }
    st["tcam_crossbar_bits"] = spec.stage.tcam_crossbar_bits;
    st["sram_crossbar_bits"] = spec.stage.sram_crossbar_bits;
    st["action_crossbar_bits"] = spec.stage.action_crossbar_bits;
    st["vliw_slots"] = spec.stage.vliw_slots;
    st["hash_ways"] = spec.stage.hash_ways;
    st["memory_ports"] = spec.stage.memory_ports;
    st["memory_port_width"] = spec.stage.memory_port_width;
    if (!spec.stage.extern_units.empty()) {
        json eu;
        for (const auto &[kind, count] : spec.stage.extern_units) eu[kind] = count;
        st["extern_units"] = eu;
    }
    doc["stage"] = st;
    return doc.dump(2) + "\n";
}

}  // namespace rmtmap
