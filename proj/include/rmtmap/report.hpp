// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end driver: IR document plus hardware spec in, mapping verdict and
// resource report out. The structured report is stable-ordered JSON
// (docs/report_schema.md); the text format mirrors the usual resource
// summary tables.
#pragma once

#include <optional>
#include <string>

#include "rmtmap/header_map.hpp"
#include "rmtmap/hsl.hpp"
#include "rmtmap/ir.hpp"
#include "rmtmap/parser_map.hpp"
#include "rmtmap/tdg_map.hpp"

namespace rmtmap {

inline constexpr const char *kToolName = "rmtmap";
inline constexpr const char *kToolVersion = "0.1.0";

struct HeaderReport {
    int field_count = 0;
    long long used_bits = 0;
    long long allocated_bits = 0;
    double waste_percent = 0.0;
    HeaderMapping mapping;
    double elapsed_ms = 0.0;
};

struct ParserReport {
    int states = 0;
    int edges = 0;
    int clusters = 0;
    int entry_count = 0;
    int capacity = 0;
    double utilization_percent = 0.0;
    StateTable state_table;
    double elapsed_ms = 0.0;
};

struct PipelineReport {
    std::string pipeline;
    int nodes = 0;
    int edges = 0;
    int stages_used = 0;
    long long latency_cycles = 0;
    UtilizationSummary summary;
    double elapsed_ms = 0.0;
};

struct Verdict {
    bool accepted = false;
    std::string phase;     // failing phase when rejected
    std::string resource;  // exhausted resource when rejected
    std::string element;   // offending program element when rejected
    std::string reason;
};

struct ResolvedConfig {
    int packing_factor = 1;
    std::string action_mode;  // "per-entry" or "fixed:<k>"
    LatencyCosts latency;
    std::string stateful_policy;  // "colocate" or "serialize"
    int match_pointer_overhead_bits = 16;
};

struct MappingReport {
    std::string program_name;
    Verdict verdict;
    ResolvedConfig config;
    std::string hardware_name;
    std::string hardware_digest;  // fnv1a-64 of the HSL document bytes
    int num_stages = 0;
    std::optional<HeaderReport> header;
    std::optional<ParserReport> parser;
    std::vector<PipelineReport> pipelines;
    int combined_stages_used = 0;
    Diagnostics diagnostics;
    bool include_timings = false;  // timings are emitted only on request
};

struct CompileOptions {
    MapperOptions mapper;
    bool include_timings = false;
};

enum class ReportFormat { Json, TableText };

/// Runs the full pipeline: IR ingestion, header mapping, parse-graph
/// mapping, TDG mapping (ingress then egress over the shared stage
/// inventory). The first mapping rejection short-circuits into a rejected
/// report. Unreadable or invalid inputs throw InputError instead.
MappingReport compile(const std::string &ir_path, const std::string &hw_path,
                      const CompileOptions &options = {});

/// Same pipeline over in-memory documents.
MappingReport compile_documents(const std::string &ir_document, const std::string &hsl_document,
                                const CompileOptions &options = {},
                                const std::string &program_name = "");

std::string render_report(const MappingReport &r, ReportFormat format);

/// Parses a structured report back. parse_report(render_report(r, Json))
/// reproduces r field for field.
MappingReport parse_report(const std::string &json_text);

/// FNV-1a 64-bit digest, hex encoded.
std::string fnv1a_digest(const std::string &bytes);

}  // namespace rmtmap
