// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rmtmap/report.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rmtmap {

using json = nlohmann::ordered_json;

std::string fnv1a_digest(const std::string &bytes) {
    uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

namespace {

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

std::string action_mode_string(const ActionModeSpec &m) {
    if (m.mode == ActionEntryMode::PerEntry) return "per-entry";
    return "fixed:" + std::to_string(m.fixed_entries);
}

ResolvedConfig resolve_config(const MapperOptions &opts, const HardwareSpec &hw) {
    ResolvedConfig cfg;
    cfg.packing_factor = opts.packing_factor > 0 ? opts.packing_factor : hw.packing_factor;
    cfg.action_mode = action_mode_string(opts.action_mode);
    cfg.latency = opts.latency;
    cfg.stateful_policy =
        opts.stateful_policy == StatefulPolicy::Colocate ? "colocate" : "serialize";
    cfg.match_pointer_overhead_bits = opts.match_pointer_overhead_bits;
    return cfg;
}

// --- JSON encoding ---------------------------------------------------------

json footprint_to_json(const MemoryFootprint &fp) {
    json j;
    j["tcam_blocks"] = fp.tcam_blocks;
    j["sram_match_blocks"] = fp.sram_match_blocks;
    j["sram_action_blocks"] = fp.sram_action_blocks;
    j["sram_stateful_blocks"] = fp.sram_stateful_blocks;
    j["vliw_slots"] = fp.vliw_slots;
    j["tcam_crossbar_bits"] = fp.tcam_crossbar_bits;
    j["sram_crossbar_bits"] = fp.sram_crossbar_bits;
    j["action_crossbar_bits"] = fp.action_crossbar_bits;
    return j;
}

MemoryFootprint footprint_from_json(const json &j) {
    MemoryFootprint fp;
    fp.tcam_blocks = j.value("tcam_blocks", 0);
    fp.sram_match_blocks = j.value("sram_match_blocks", 0);
    fp.sram_action_blocks = j.value("sram_action_blocks", 0);
    fp.sram_stateful_blocks = j.value("sram_stateful_blocks", 0);
    fp.vliw_slots = j.value("vliw_slots", 0);
    fp.tcam_crossbar_bits = j.value("tcam_crossbar_bits", 0);
    fp.sram_crossbar_bits = j.value("sram_crossbar_bits", 0);
    fp.action_crossbar_bits = j.value("action_crossbar_bits", 0);
    return fp;
}

json report_to_json(const MappingReport &r) {
    json doc;
    doc["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    doc["program"] = r.program_name;

    json verdict;
    verdict["status"] = r.verdict.accepted ? "accepted" : "rejected";
    if (!r.verdict.accepted) {
        verdict["phase"] = r.verdict.phase;
        verdict["resource"] = r.verdict.resource;
        verdict["element"] = r.verdict.element;
        verdict["reason"] = r.verdict.reason;
    }
    doc["verdict"] = verdict;

    doc["config"] = {{"packing_factor", r.config.packing_factor},
                     {"action_mode", r.config.action_mode},
                     {"latency_costs",
                      {{"base", r.config.latency.base},
                       {"match", r.config.latency.match},
                       {"action", r.config.latency.action},
                       {"other", r.config.latency.other}}},
                     {"stateful_policy", r.config.stateful_policy},
                     {"match_pointer_overhead_bits", r.config.match_pointer_overhead_bits}};
    doc["hardware"] = {{"name", r.hardware_name},
                       {"digest", r.hardware_digest},
                       {"num_stages", r.num_stages}};

    if (r.header) {
        json h;
        h["field_count"] = r.header->field_count;
        h["used_bits"] = r.header->used_bits;
        h["allocated_bits"] = r.header->allocated_bits;
        h["waste_percent"] = r.header->waste_percent;
        json assigns = json::array();
        for (const auto &a : r.header->mapping.assignments) {
            json ja;
            ja["field"] = a.field;
            ja["bits"] = a.field_bits;
            json cs = json::array();
            for (const auto &c : a.containers)
                cs.push_back({{"width", c.width_bits}, {"count", c.count}});
            ja["containers"] = cs;
            assigns.push_back(ja);
        }
        h["assignments"] = assigns;
        if (r.include_timings) h["elapsed_ms"] = r.header->elapsed_ms;
        doc["header_mapping"] = h;
    }

    if (r.parser) {
        json p;
        p["states"] = r.parser->states;
        p["edges"] = r.parser->edges;
        p["clusters"] = r.parser->clusters;
        p["entries"] = r.parser->entry_count;
        p["capacity"] = r.parser->capacity;
        p["utilization_percent"] = r.parser->utilization_percent;
        json entries = json::array();
        for (const auto &e : r.parser->state_table.entries) {
            json je;
            je["cluster"] = e.cluster;
            je["from"] = e.from_node;
            je["to"] = e.to_node;
            je["to_cluster"] = e.to_cluster;
            je["value"] = e.value_hex;
            je["mask"] = e.mask_hex;
            json lookups = json::array();
            for (const auto &l : e.lookup)
                lookups.push_back({{"field", l.field},
                                   {"width", l.width_bits},
                                   {"slots", l.slots},
                                   {"exit_select", l.exit_select}});
            je["lookup"] = lookups;
            je["extract"] = e.extract_headers;
            je["slots"] = e.lookup_slots;
            je["bits_padded"] = e.lookup_bits_padded;
            entries.push_back(je);
        }
        p["state_table"] = entries;
        if (r.include_timings) p["elapsed_ms"] = r.parser->elapsed_ms;
        doc["parser_mapping"] = p;
    }

    if (!r.pipelines.empty()) {
        json tdg;
        json pipes = json::array();
        for (const auto &pr : r.pipelines) {
            json jp;
            jp["name"] = pr.pipeline;
            jp["nodes"] = pr.nodes;
            jp["edges"] = pr.edges;
            jp["stages_used"] = pr.stages_used;
            jp["latency_cycles"] = pr.latency_cycles;
            jp["totals"] = footprint_to_json(pr.summary.totals);
            json rows = json::array();
            for (const auto &row : pr.summary.rows) {
                json jr;
                jr["stage"] = row.stage;
                jr["footprint"] = footprint_to_json(row.footprint);
                jr["tables"] = row.tables;
                rows.push_back(jr);
            }
            jp["per_stage"] = rows;
            if (r.include_timings) jp["elapsed_ms"] = pr.elapsed_ms;
            pipes.push_back(jp);
        }
        tdg["pipelines"] = pipes;
        tdg["combined_stages_used"] = r.combined_stages_used;
        doc["tdg_mapping"] = tdg;
    }

    json diags = json::array();
    for (const auto &d : r.diagnostics) {
        const char *sev = d.severity == Severity::Error ? "error"
                          : d.severity == Severity::Warning ? "warning"
                                                            : "info";
        diags.push_back({{"severity", sev}, {"message", d.message}});
    }
    doc["diagnostics"] = diags;
    return doc;
}

// --- Text rendering --------------------------------------------------------

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void render_text_table(std::ostringstream &out, const std::vector<std::string> &headers,
                       const std::vector<std::vector<std::string>> &rows) {
    std::vector<size_t> width(headers.size());
    for (size_t i = 0; i < headers.size(); ++i) width[i] = headers[i].size();
    for (const auto &row : rows)
        for (size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    auto emit_row = [&](const std::vector<std::string> &cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            out << (i == 0 ? "| " : " ");
            out << cells[i] << std::string(width[i] - cells[i].size(), ' ') << " |";
        }
        out << "\n";
    };
    emit_row(headers);
    out << "|";
    for (size_t i = 0; i < headers.size(); ++i)
        out << std::string(width[i] + 2, '-') << "|";
    out << "\n";
    for (const auto &row : rows) emit_row(row);
}

std::string render_text(const MappingReport &r) {
    std::ostringstream out;
    out << kToolName << " " << kToolVersion << " - mapping report for '" << r.program_name
        << "'\n";
    out << "hardware: " << r.hardware_name << " (" << r.hardware_digest << ", "
        << r.num_stages << " stages)\n";
    out << "config: packing_factor=" << r.config.packing_factor
        << " action_mode=" << r.config.action_mode
        << " stateful_policy=" << r.config.stateful_policy
        << " latency_costs=base:" << r.config.latency.base << ",match:" << r.config.latency.match
        << ",action:" << r.config.latency.action << ",other:" << r.config.latency.other
        << " pointer_overhead=" << r.config.match_pointer_overhead_bits << "b\n";
    if (r.verdict.accepted) {
        out << "verdict: ACCEPTED\n";
    } else {
        out << "verdict: REJECTED (phase=" << r.verdict.phase
            << ", resource=" << r.verdict.resource << ", element=" << r.verdict.element
            << ")\n  reason: " << r.verdict.reason << "\n";
    }

    if (r.header) {
        out << "\nHeader Mapping\n";
        render_text_table(out,
                          {"# Header Fields", "Total Bitwidth", "Total PHV Bitwidth", "Waste (%)",
                           "Ex. time (ms)"},
                          {{std::to_string(r.header->field_count),
                            std::to_string(r.header->used_bits),
                            std::to_string(r.header->allocated_bits),
                            format_double(r.header->waste_percent),
                            format_double(r.header->elapsed_ms)}});
    }
    if (r.parser) {
        out << "\nParse Graph Mapping\n";
        render_text_table(out,
                          {"# States in Parse Graph", "# Edges in Parse Graph",
                           "Req. TCAM Entries", "TCAM Capacity (%)", "Ex. time (ms)"},
                          {{std::to_string(r.parser->states), std::to_string(r.parser->edges),
                            std::to_string(r.parser->entry_count),
                            format_double(r.parser->utilization_percent),
                            format_double(r.parser->elapsed_ms)}});
    }
    if (!r.pipelines.empty()) {
        out << "\nTDG Mapping\n";
        std::vector<std::vector<std::string>> rows;
        for (const auto &p : r.pipelines) {
            rows.push_back({p.pipeline, std::to_string(p.nodes), std::to_string(p.edges),
                            std::to_string(p.stages_used), std::to_string(p.latency_cycles),
                            std::to_string(p.summary.totals.tcam_blocks),
                            std::to_string(p.summary.totals.sram_total()),
                            format_double(p.elapsed_ms)});
        }
        render_text_table(out,
                          {"Pipeline", "# Nodes in TDG", "# Edges in TDG", "Stages",
                           "Latency (in cycle)", "# TCAM Block Usage", "# SRAM Block Usage",
                           "Ex. time (ms)"},
                          rows);
        out << "combined stages used: " << r.combined_stages_used << "\n";
        for (const auto &p : r.pipelines) {
            if (p.summary.rows.empty()) continue;
            out << "\nper-stage detail (" << p.pipeline << "):\n";
            for (const auto &row : p.summary.rows) {
                out << "  stage " << row.stage << ": tcam=" << row.footprint.tcam_blocks
                    << " sram(m/a/s)=" << row.footprint.sram_match_blocks << "/"
                    << row.footprint.sram_action_blocks << "/"
                    << row.footprint.sram_stateful_blocks
                    << " vliw=" << row.footprint.vliw_slots << " tables=";
                for (size_t i = 0; i < row.tables.size(); ++i)
                    out << (i ? "," : "") << row.tables[i];
                out << "\n";
            }
        }
    }
    if (!r.diagnostics.empty()) {
        out << "\ndiagnostics:\n";
        for (const auto &d : r.diagnostics) {
            const char *sev = d.severity == Severity::Error ? "error"
                              : d.severity == Severity::Warning ? "warning"
                                                                : "info";
            out << "  " << sev << ": " << d.message << "\n";
        }
    }
    return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Pipeline driver
// ---------------------------------------------------------------------------

MappingReport compile_documents(const std::string &ir_document, const std::string &hsl_document,
                                const CompileOptions &options, const std::string &program_name) {
    MappingReport report;
    report.include_timings = options.include_timings;

    Diagnostics diags;
    HardwareSpec hw = parse_hsl(hsl_document, &diags);
    report.hardware_name = hw.name;
    report.hardware_digest = fnv1a_digest(hsl_document);
    report.num_stages = hw.num_stages;
    report.config = resolve_config(options.mapper, hw);

    IrProgram prog = parse_ir(ir_document, &diags);
    report.program_name = program_name.empty() ? prog.name : program_name;

    try {
        {
            const auto t0 = std::chrono::steady_clock::now();
            HeaderReport h;
            h.mapping = map_headers(prog.fields, hw.phv);
            h.field_count = static_cast<int>(prog.fields.size());
            h.used_bits = h.mapping.used_bits;
            h.allocated_bits = h.mapping.allocated_bits;
            h.waste_percent = waste_percent(h.mapping);
            h.elapsed_ms = ms_since(t0);
            report.header = std::move(h);
        }
        {
            const auto t0 = std::chrono::steady_clock::now();
            ParseGraph g = build_parse_graph(prog, &diags);
            ClusterGraph cg = cluster_parse_graph(g, hw.parser);
            StateTable st = emit_state_table(cg, hw.parser);
            CapacityVerdict cv = check_capacity(st, hw.parser);
            ParserReport p;
            p.states = static_cast<int>(g.nodes.size());
            p.edges = static_cast<int>(g.edges.size());
            p.clusters = static_cast<int>(cg.clusters.size());
            p.entry_count = cv.entry_count;
            p.capacity = cv.capacity;
            p.utilization_percent = cv.utilization_percent;
            p.state_table = std::move(st);
            p.elapsed_ms = ms_since(t0);
            report.parser = std::move(p);
            if (!cv.accepted)
                throw RejectionError("parser", "tcam-entries", "state table", cv.reason);
        }
        {
            PipelineBudget budget(hw);
            std::set<int> combined;
            for (const auto &pipe : prog.pipelines) {
                const auto t0 = std::chrono::steady_clock::now();
                Tdg tdg = build_tdg(prog, pipe.name, &diags);
                StrictDag dag = apply_stateful_policy(reduce_dependencies(tdg),
                                                      options.mapper.stateful_policy);
                LevelAssignment levels = assign_levels(dag);
                TdgMapping m = place_tables(dag, levels, hw, prog.field_index, prog.externs,
                                            options.mapper, &budget);
                m.latency_cycles = compute_latency(m, dag, options.mapper.latency);
                PipelineReport pr;
                pr.pipeline = pipe.name;
                pr.nodes = static_cast<int>(dag.tables.size());
                pr.edges = static_cast<int>(dag.edges.size());
                pr.stages_used = m.stages_used;
                pr.latency_cycles = m.latency_cycles;
                pr.summary = summarize(m);
                pr.elapsed_ms = ms_since(t0);
                combined.insert(m.occupied_stages.begin(), m.occupied_stages.end());
                report.pipelines.push_back(std::move(pr));
            }
            report.combined_stages_used = static_cast<int>(combined.size());
        }
        report.verdict.accepted = true;
    } catch (const RejectionError &e) {
        report.verdict.accepted = false;
        report.verdict.phase = e.phase();
        report.verdict.resource = e.resource();
        report.verdict.element = e.element();
        report.verdict.reason = e.what();
    }
    report.diagnostics = std::move(diags);
    return report;
}

MappingReport compile(const std::string &ir_path, const std::string &hw_path,
                      const CompileOptions &options) {
    const std::string ir_doc = read_file(ir_path);
    const std::string hsl_doc = read_file(hw_path);
    return compile_documents(ir_doc, hsl_doc, options);
}

std::string render_report(const MappingReport &r, ReportFormat format) {
    if (format == ReportFormat::TableText) return render_text(r);
    return report_to_json(r).dump(2) + "\n";
}

namespace {

MappingReport parse_report_impl(const json &doc) {
    MappingReport r;
    r.program_name = doc.value("program", "");
    const json &verdict = doc.at("verdict");
    r.verdict.accepted = verdict.value("status", "") == "accepted";
    r.verdict.phase = verdict.value("phase", "");
    r.verdict.resource = verdict.value("resource", "");
    r.verdict.element = verdict.value("element", "");
    r.verdict.reason = verdict.value("reason", "");

    const json &cfg = doc.at("config");
    r.config.packing_factor = cfg.value("packing_factor", 1);
    r.config.action_mode = cfg.value("action_mode", "per-entry");
    r.config.latency.base = cfg.at("latency_costs").value("base", 12);
    r.config.latency.match = cfg.at("latency_costs").value("match", 12);
    r.config.latency.action = cfg.at("latency_costs").value("action", 3);
    r.config.latency.other = cfg.at("latency_costs").value("other", 1);
    r.config.stateful_policy = cfg.value("stateful_policy", "colocate");
    r.config.match_pointer_overhead_bits = cfg.value("match_pointer_overhead_bits", 16);

    const json &hwj = doc.at("hardware");
    r.hardware_name = hwj.value("name", "");
    r.hardware_digest = hwj.value("digest", "");
    r.num_stages = hwj.value("num_stages", 0);

    if (doc.contains("header_mapping")) {
        const json &h = doc.at("header_mapping");
        HeaderReport hr;
        hr.field_count = h.value("field_count", 0);
        hr.used_bits = h.value("used_bits", 0ll);
        hr.allocated_bits = h.value("allocated_bits", 0ll);
        hr.waste_percent = h.value("waste_percent", 0.0);
        for (const json &ja : h.value("assignments", json::array())) {
            FieldAssignment fa;
            fa.field = ja.value("field", "");
            fa.field_bits = ja.value("bits", 0);
            for (const json &jc : ja.value("containers", json::array()))
                fa.containers.push_back({jc.value("width", 0), jc.value("count", 0)});
            hr.mapping.assignments.push_back(std::move(fa));
        }
        hr.mapping.used_bits = static_cast<int>(hr.used_bits);
        hr.mapping.allocated_bits = static_cast<int>(hr.allocated_bits);
        if (h.contains("elapsed_ms")) {
            hr.elapsed_ms = h.at("elapsed_ms").get<double>();
            r.include_timings = true;
        }
        r.header = std::move(hr);
    }

    if (doc.contains("parser_mapping")) {
        const json &p = doc.at("parser_mapping");
        ParserReport pr;
        pr.states = p.value("states", 0);
        pr.edges = p.value("edges", 0);
        pr.clusters = p.value("clusters", 0);
        pr.entry_count = p.value("entries", 0);
        pr.capacity = p.value("capacity", 0);
        pr.utilization_percent = p.value("utilization_percent", 0.0);
        for (const json &je : p.value("state_table", json::array())) {
            StateTableEntry e;
            e.cluster = je.value("cluster", 0);
            e.from_node = je.value("from", "");
            e.to_node = je.value("to", "");
            e.to_cluster = je.value("to_cluster", -1);
            e.value_hex = je.value("value", "");
            e.mask_hex = je.value("mask", "");
            for (const json &jl : je.value("lookup", json::array())) {
                LookupFieldUse u;
                u.field = jl.value("field", "");
                u.width_bits = jl.value("width", 0);
                u.slots = jl.value("slots", 0);
                u.exit_select = jl.value("exit_select", false);
                e.lookup.push_back(std::move(u));
            }
            for (const json &jx : je.value("extract", json::array()))
                e.extract_headers.push_back(jx.get<std::string>());
            e.lookup_slots = je.value("slots", 0);
            e.lookup_bits_padded = je.value("bits_padded", 0);
            pr.state_table.entries.push_back(std::move(e));
        }
        if (p.contains("elapsed_ms")) {
            pr.elapsed_ms = p.at("elapsed_ms").get<double>();
            r.include_timings = true;
        }
        r.parser = std::move(pr);
    }

    if (doc.contains("tdg_mapping")) {
        const json &tdg = doc.at("tdg_mapping");
        for (const json &jp : tdg.value("pipelines", json::array())) {
            PipelineReport pr;
            pr.pipeline = jp.value("name", "");
            pr.nodes = jp.value("nodes", 0);
            pr.edges = jp.value("edges", 0);
            pr.stages_used = jp.value("stages_used", 0);
            pr.latency_cycles = jp.value("latency_cycles", 0ll);
            pr.summary.stages_used = pr.stages_used;
            pr.summary.latency_cycles = pr.latency_cycles;
            pr.summary.totals = footprint_from_json(jp.at("totals"));
            for (const json &jr : jp.value("per_stage", json::array())) {
                StageUtilizationRow row;
                row.stage = jr.value("stage", 0);
                row.footprint = footprint_from_json(jr.at("footprint"));
                for (const json &jt : jr.value("tables", json::array()))
                    row.tables.push_back(jt.get<std::string>());
                pr.summary.rows.push_back(std::move(row));
            }
            if (jp.contains("elapsed_ms")) {
                pr.elapsed_ms = jp.at("elapsed_ms").get<double>();
                r.include_timings = true;
            }
            r.pipelines.push_back(std::move(pr));
        }
        r.combined_stages_used = tdg.value("combined_stages_used", 0);
    }

    for (const json &jd : doc.value("diagnostics", json::array())) {
        const std::string sev = jd.value("severity", "info");
        Diagnostic d;
        d.severity = sev == "error" ? Severity::Error
                     : sev == "warning" ? Severity::Warning
                                        : Severity::Info;
        d.message = jd.value("message", "");
        r.diagnostics.push_back(std::move(d));
    }
    return r;
}

}  // namespace

MappingReport parse_report(const std::string &json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw InputError("report: malformed document: " + std::string(e.what()));
    }
    try {
        return parse_report_impl(doc);
    } catch (const json::exception &e) {
        throw InputError("report: malformed document: " + std::string(e.what()));
    }
}

}  // namespace rmtmap
