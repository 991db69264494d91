// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
//
// rmtmap CLI: maps a P4 program's IR onto a V1Model switch described by an
// HSL document and reports realizability and resource consumption.
// Exit codes: 0 = accepted, 2 = mapping rejection, 1 = input/usage error.
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rmtmap/report.hpp"

namespace {

bool parse_action_mode(const std::string &text, rmtmap::ActionModeSpec &out, std::string &err) {
    if (text == "per-entry") {
        out.mode = rmtmap::ActionEntryMode::PerEntry;
        return true;
    }
    if (text.rfind("fixed:", 0) == 0) {
        try {
            out.fixed_entries = std::stoll(text.substr(6));
        } catch (...) {
            err = "invalid fixed action entry count in '" + text + "'";
            return false;
        }
        if (out.fixed_entries < 0) {
            err = "fixed action entry count must be >= 0";
            return false;
        }
        out.mode = rmtmap::ActionEntryMode::Fixed;
        return true;
    }
    err = "action mode must be 'per-entry' or 'fixed:<k>'";
    return false;
}

bool parse_latency_costs(const std::string &text, rmtmap::LatencyCosts &out, std::string &err) {
    int values[4];
    size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        const size_t comma = text.find(',', pos);
        const bool last = i == 3;
        if ((comma == std::string::npos) != last) {
            err = "latency costs must be four integers: match,action,other,base";
            return false;
        }
        try {
            values[i] = std::stoi(text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                              : comma - pos));
        } catch (...) {
            err = "invalid latency cost in '" + text + "'";
            return false;
        }
        pos = comma + 1;
    }
    out.match = values[0];
    out.action = values[1];
    out.other = values[2];
    out.base = values[3];
    return true;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"rmtmap: map a P4 program's IR onto a V1Model RMT switch"};

    std::string ir_path;
    std::string hw_path;
    int packing_factor = 0;
    std::string action_mode = "per-entry";
    std::string latency_costs;
    std::string stateful_policy = "colocate";
    std::string format = "json";
    std::string out_path;
    bool timings = false;

    app.add_option("--ir", ir_path, "IR document emitted by the frontend")->required();
    app.add_option("--hw", hw_path, "hardware specification (HSL) document")->required();
    app.add_option("--packing-factor", packing_factor,
                   "SRAM packing unit size in blocks (default: from the HSL document)");
    app.add_option("--action-mode", action_mode,
                   "action entry reservation: per-entry | fixed:<k> (default per-entry)");
    app.add_option("--latency-costs", latency_costs,
                   "per-boundary cycle costs as match,action,other,base");
    app.add_option("--stateful-policy", stateful_policy,
                   "placement of tables sharing stateful memory: colocate | serialize");
    app.add_option("--format", format, "report format: json | table (default json)");
    app.add_option("--out", out_path, "write the report to this file instead of stdout");
    app.add_flag("--timings", timings, "include per-phase wall-clock timings in the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 1;
    }

    rmtmap::CompileOptions options;
    options.include_timings = timings;
    options.mapper.packing_factor = packing_factor;

    std::string err;
    if (!parse_action_mode(action_mode, options.mapper.action_mode, err)) {
        std::cerr << "error: " << err << "\n";
        return 1;
    }
    if (!latency_costs.empty() && !parse_latency_costs(latency_costs, options.mapper.latency, err)) {
        std::cerr << "error: " << err << "\n";
        return 1;
    }
    if (stateful_policy == "colocate") {
        options.mapper.stateful_policy = rmtmap::StatefulPolicy::Colocate;
    } else if (stateful_policy == "serialize") {
        options.mapper.stateful_policy = rmtmap::StatefulPolicy::Serialize;
    } else {
        std::cerr << "error: stateful policy must be 'colocate' or 'serialize'\n";
        return 1;
    }
    rmtmap::ReportFormat report_format;
    if (format == "json") {
        report_format = rmtmap::ReportFormat::Json;
    } else if (format == "table") {
        report_format = rmtmap::ReportFormat::TableText;
    } else {
        std::cerr << "error: format must be 'json' or 'table'\n";
        return 1;
    }

    try {
        const rmtmap::MappingReport report = rmtmap::compile(ir_path, hw_path, options);
        const std::string text = rmtmap::render_report(report, report_format);
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) {
                std::cerr << "error: cannot write '" << out_path << "'\n";
                return 1;
            }
            out << text;
        }
        return report.verdict.accepted ? 0 : 2;
    } catch (const rmtmap::InputError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
