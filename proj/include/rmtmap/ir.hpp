// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Target-independent representation of a P4 program as emitted by the
// reference frontend (JSON context dump), reduced to the subset this
// backend consumes: headers, parsers, pipelines, tables, actions and
// stateful object declarations. See docs/ir_subset.md.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rmtmap/diagnostics.hpp"

namespace rmtmap {

// A field reference is "headerInstance.fieldName".
using FieldRef = std::string;

struct HeaderField {
    std::string name;
    std::string header_instance;
    int width_bits = 0;
    bool is_metadata = false;

    FieldRef ref() const { return header_instance + "." + name; }
};

enum class MatchKind { Exact, Ternary, Lpm, Range };

const char *to_string(MatchKind k);

struct MatchFieldSpec {
    FieldRef field;
    MatchKind kind = MatchKind::Exact;
};

enum class ExternKind { Register, Counter, Meter };

struct ExternObject {
    std::string name;
    ExternKind kind = ExternKind::Register;
    long long entries = 0;
    int entry_bits = 0;

    long long total_bits() const { return entries * static_cast<long long>(entry_bits); }
};

struct ExternOp {
    std::string extern_name;
    std::string op_kind;  // "register_read", "register_write", "count", "execute_meter"
};

struct ActionDef {
    std::string name;
    std::set<FieldRef> reads;
    std::set<FieldRef> writes;
    std::vector<ExternOp> extern_ops;
    int arg_width_total = 0;  // total runtime-argument bits loaded from action memory
};

struct LogicalTable {
    std::string name;
    std::vector<MatchFieldSpec> match_fields;
    long long max_entries = 1;
    std::vector<std::string> actions;
    // action name (or "__MISS__"/"__HIT__"/"__DEFAULT__") -> next node name; empty = exit
    std::map<std::string, std::string> next_table_map;
    std::set<std::string> extern_refs;
    int tdg_order = 0;              // ordinal of first appearance in the pipeline
    int max_action_arg_bits = 0;    // widest action's runtime-argument bits
    int max_action_read_bits = 0;   // widest action's PHV operand bits

    int match_width_bits(const std::map<FieldRef, HeaderField> &fields) const;
    bool has_non_exact_match() const {
        for (const auto &m : match_fields)
            if (m.kind != MatchKind::Exact) return true;
        return false;
    }
};

// Control-flow fork that is not a match-action table: routes execution to
// one of two successors. Transparent for dependency purposes.
struct Conditional {
    std::string name;
    std::string true_next;   // empty = exit
    std::string false_next;  // empty = exit
};

struct Pipeline {
    std::string name;
    std::string init_node;  // table or conditional name; empty = empty pipeline
    std::vector<LogicalTable> tables;
    std::vector<Conditional> conditionals;
};

struct ParserState {
    std::string name;
    std::vector<std::string> extracted_headers;  // header instance names, in order
    std::vector<FieldRef> select_fields;         // transition key, in order
};

struct ParserTransition {
    std::string from_state;
    std::string to_state;  // parse-graph accept sink for accepting transitions
    std::string value_hex;  // empty = default/unconditional transition
    std::string mask_hex;   // empty = exact value
};

struct RawParser {
    std::string name;
    std::string init_state;
    std::vector<ParserState> states;
    std::vector<ParserTransition> transitions;
};

struct IrProgram {
    std::string name;
    std::vector<HeaderField> fields;                 // in declaration order
    std::map<FieldRef, HeaderField> field_index;
    std::map<std::string, int> header_bits;          // header instance -> total bits
    std::vector<RawParser> parsers;
    std::vector<Pipeline> pipelines;
    std::map<std::string, ActionDef> actions;
    std::map<std::string, ExternObject> externs;

    const Pipeline *find_pipeline(const std::string &name) const;
};

/// Parses the frontend's IR document. Unknown constructs are reported as
/// diagnostics; unsupported ones (variable-length headers, atomic blocks)
/// throw UnsupportedError. Malformed documents throw InputError with the
/// offending byte offset.
IrProgram parse_ir(const std::string &ir_document, Diagnostics *diags = nullptr);

// ---------------------------------------------------------------------------
// Parse graph
// ---------------------------------------------------------------------------

/// Name of the synthetic accept sink every accepting transition points to.
inline const std::string kAcceptSink = "$accept";

struct ParseGraphNode {
    std::string id;                                   // parser state name
    std::vector<std::string> header_instances;        // extracted in this state
    int total_header_bits = 0;
};

struct ParseGraphEdge {
    std::string from;
    std::string to;                       // may be kAcceptSink
    std::vector<FieldRef> select_fields;  // empty for unconditional transitions
    std::vector<int> select_widths;       // bit width per select field
    std::string value_hex;
    std::string mask_hex;
};

struct ParseGraph {
    std::vector<ParseGraphNode> nodes;  // excludes the accept sink
    std::vector<ParseGraphEdge> edges;
    std::string start_node;

    const ParseGraphNode *find_node(const std::string &id) const;
};

/// Derives the parse graph from the program's parser. The accept state is
/// an explicit sink so that every transition is an edge. Rejects cyclic
/// parser state machines.
ParseGraph build_parse_graph(const IrProgram &program, Diagnostics *diags = nullptr);

// ---------------------------------------------------------------------------
// Table dependency graph
// ---------------------------------------------------------------------------

/// Kinds ordered by strictness: MATCH > ACTION > REVERSE_MATCH = SUCCESSOR
/// > NONE. MATCH and ACTION force a later stage; REVERSE_MATCH and
/// SUCCESSOR permit the same stage.
enum class DependencyKind : uint8_t { None = 0, Successor = 1, ReverseMatch = 2, Action = 3, Match = 4 };

const char *to_string(DependencyKind k);

/// True when an edge of this kind forces its head into a strictly later
/// stage than its tail.
inline bool is_strict(DependencyKind k) {
    return k == DependencyKind::Match || k == DependencyKind::Action;
}

/// Strictness comparison. REVERSE_MATCH and SUCCESSOR are equally strict;
/// REVERSE_MATCH is retained when both are present so the reduction stays
/// deterministic.
inline bool stricter(DependencyKind a, DependencyKind b) {
    return static_cast<uint8_t>(a) > static_cast<uint8_t>(b);
}

struct ControlFlowInfo {
    // direct_successors[i] = indices of tables immediately following table i
    // (conditionals flattened).
    std::vector<std::set<int>> direct_successors;
    // reachable[i] = indices of tables reachable from table i via control flow.
    std::vector<std::set<int>> reachable;
};

struct TdgEdge {
    int from = 0;
    int to = 0;
    std::set<DependencyKind> kinds;  // every detected kind for this ordered pair

    DependencyKind strictest() const { return *kinds.rbegin(); }
};

struct Tdg {
    std::string pipeline;
    std::vector<LogicalTable> tables;      // indexed by edge endpoints
    std::vector<TdgEdge> edges;            // one per related ordered pair
    std::vector<std::set<int>> stateful_groups;  // table indices sharing an extern
    std::map<std::string, std::set<int>> extern_users;  // extern name -> table indices
};

/// Classifies the dependency from table a to table b, assuming a precedes b
/// on some control path. Returns the strictest applicable kind. Pure in its
/// inputs.
DependencyKind classify_dependency(const LogicalTable &a, const LogicalTable &b,
                                   bool b_directly_follows_a,
                                   const std::map<std::string, ActionDef> &actions);

/// Builds the table dependency graph for one pipeline ("ingress" or
/// "egress"). Keeps one edge per related ordered pair carrying all detected
/// kinds; collects stateful sharing groups. Rejects cyclic control flow.
Tdg build_tdg(const IrProgram &program, const std::string &pipeline,
              Diagnostics *diags = nullptr);

}  // namespace rmtmap
