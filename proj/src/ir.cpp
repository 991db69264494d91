// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rmtmap/ir.hpp"

#include <algorithm>
#include <functional>

#include <json.hpp>

namespace rmtmap {

using json = nlohmann::json;

const char *to_string(MatchKind k) {
    switch (k) {
        case MatchKind::Exact: return "exact";
        case MatchKind::Ternary: return "ternary";
        case MatchKind::Lpm: return "lpm";
        case MatchKind::Range: return "range";
    }
    return "?";
}

const char *to_string(DependencyKind k) {
    switch (k) {
        case DependencyKind::None: return "none";
        case DependencyKind::Successor: return "successor";
        case DependencyKind::ReverseMatch: return "reverse_match";
        case DependencyKind::Action: return "action";
        case DependencyKind::Match: return "match";
    }
    return "?";
}

int LogicalTable::match_width_bits(const std::map<FieldRef, HeaderField> &fields) const {
    int total = 0;
    for (const auto &m : match_fields) {
        auto it = fields.find(m.field);
        if (it != fields.end()) total += it->second.width_bits;
    }
    return total;
}

const Pipeline *IrProgram::find_pipeline(const std::string &pname) const {
    for (const auto &p : pipelines)
        if (p.name == pname) return &p;
    return nullptr;
}

const ParseGraphNode *ParseGraph::find_node(const std::string &id) const {
    for (const auto &n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

namespace {

void note(Diagnostics *diags, Diagnostic d) {
    if (diags) diags->push_back(std::move(d));
}

FieldRef field_ref_from_target(const json &target, const std::string &context) {
    if (!target.is_array() || target.size() != 2 || !target[0].is_string() ||
        !target[1].is_string())
        throw InputError("ir: malformed field reference in " + context);
    return target[0].get<std::string>() + "." + target[1].get<std::string>();
}

MatchKind parse_match_kind(const std::string &s, const std::string &table,
                           Diagnostics *diags) {
    if (s == "exact") return MatchKind::Exact;
    if (s == "ternary") return MatchKind::Ternary;
    if (s == "lpm") return MatchKind::Lpm;
    if (s == "range") return MatchKind::Range;
    if (s == "valid") return MatchKind::Exact;  // validity bit, matched exactly
    note(diags, Diagnostic::warning("ir: unknown match kind '" + s + "' in table '" + table +
                                    "', treated as ternary"));
    return MatchKind::Ternary;
}

// Collects every field reference appearing anywhere inside an expression
// tree (conditional expressions, computed action operands).
void collect_expression_fields(const json &node, std::set<FieldRef> &out) {
    if (node.is_object()) {
        if (node.value("type", "") == "field" && node.contains("value")) {
            const json &v = node.at("value");
            if (v.is_array() && v.size() == 2 && v[0].is_string() && v[1].is_string()) {
                out.insert(v[0].get<std::string>() + "." + v[1].get<std::string>());
                return;
            }
        }
        for (const auto &item : node.items()) collect_expression_fields(item.value(), out);
    } else if (node.is_array()) {
        for (const auto &item : node) collect_expression_fields(item, out);
    }
}

struct PrimitiveEffect {
    std::set<FieldRef> reads;
    std::set<FieldRef> writes;
    std::vector<ExternOp> extern_ops;
};

// Ops whose first parameter is the destination field and remaining field
// parameters are sources.
const std::set<std::string> kWriteFirstOps = {
    "assign", "modify_field", "add", "subtract", "bit_and", "bit_or", "bit_xor",
    "shift_left", "shift_right", "hash", "modify_field_with_hash_based_offset",
    "modify_field_rng_uniform"};

// Ops with no field effects.
const std::set<std::string> kNoEffectOps = {"no_op", "exit", "drop", "clone_ingress_pkt_to_egress",
                                            "clone_egress_pkt_to_egress", "generate_digest",
                                            "recirculate", "resubmit", "truncate"};

PrimitiveEffect primitive_effect(const json &prim, const std::string &action_name,
                                 Diagnostics *diags) {
    PrimitiveEffect eff;
    const std::string op = prim.value("op", "");
    const json params = prim.value("parameters", json::array());

    auto field_at = [&](size_t i) -> std::optional<FieldRef> {
        if (i >= params.size()) return std::nullopt;
        const json &p = params[i];
        if (p.is_object() && p.value("type", "") == "field")
            return field_ref_from_target(p.at("value"), "action '" + action_name + "'");
        return std::nullopt;
    };
    auto extern_at = [&](size_t i) -> std::optional<std::string> {
        if (i >= params.size()) return std::nullopt;
        const json &p = params[i];
        const std::string t = p.is_object() ? p.value("type", "") : "";
        if (t == "register_array" || t == "counter_array" || t == "meter_array")
            return p.at("value").get<std::string>();
        return std::nullopt;
    };
    auto reads_from_all_params = [&](size_t first) {
        for (size_t i = first; i < params.size(); ++i) {
            if (auto f = field_at(i)) eff.reads.insert(*f);
            else if (params[i].is_object() && params[i].value("type", "") == "expression")
                collect_expression_fields(params[i], eff.reads);
        }
    };

    if (kWriteFirstOps.count(op)) {
        if (auto dst = field_at(0)) eff.writes.insert(*dst);
        reads_from_all_params(1);
        return eff;
    }
    if (kNoEffectOps.count(op)) return eff;
    if (op == "register_read") {
        if (auto dst = field_at(0)) eff.writes.insert(*dst);
        if (auto reg = extern_at(1)) eff.extern_ops.push_back({*reg, "register_read"});
        reads_from_all_params(2);
        return eff;
    }
    if (op == "register_write") {
        if (auto reg = extern_at(0)) eff.extern_ops.push_back({*reg, "register_write"});
        reads_from_all_params(1);
        return eff;
    }
    if (op == "count") {
        if (auto ctr = extern_at(0)) eff.extern_ops.push_back({*ctr, "count"});
        reads_from_all_params(1);
        return eff;
    }
    if (op == "execute_meter") {
        if (auto mtr = extern_at(0)) eff.extern_ops.push_back({*mtr, "execute_meter"});
        reads_from_all_params(1);
        if (auto dst = field_at(2)) {
            eff.reads.erase(*dst);
            eff.writes.insert(*dst);
        }
        return eff;
    }
    if (op == "mark_to_drop") {
        if (auto dst = field_at(0)) eff.writes.insert(*dst);
        return eff;
    }

    // Unknown primitive: keep the program mappable but assume the worst
    // about its field effects so dependency analysis stays sound.
    note(diags, Diagnostic::warning("ir: unknown primitive op '" + op + "' in action '" +
                                    action_name + "'; field operands treated as read-write"));
    for (size_t i = 0; i < params.size(); ++i) {
        if (auto f = field_at(i)) {
            eff.reads.insert(*f);
            eff.writes.insert(*f);
        }
    }
    return eff;
}

void check_not_atomic(const json &obj, const std::string &what) {
    if (obj.is_object() && obj.value("atomic", false))
        throw UnsupportedError("atomic transaction (" + what + ")");
}

}  // namespace

namespace {

IrProgram parse_ir_impl(const std::string &ir_document, Diagnostics *diags) {
    json doc;
    try {
        doc = json::parse(ir_document);
    } catch (const json::parse_error &e) {
        throw InputError("ir: malformed document at byte " + std::to_string(e.byte) + ": " +
                         e.what());
    }
    if (!doc.is_object()) throw InputError("ir: document root must be an object");

    IrProgram prog;
    prog.name = doc.value("program", std::string{"p4-program"});

    // --- header types and instances ---
    struct TypeFields {
        std::vector<std::pair<std::string, int>> fields;
    };
    std::map<std::string, TypeFields> header_types;
    for (const json &ht : doc.value("header_types", json::array())) {
        TypeFields tf;
        const std::string tname = ht.value("name", "");
        for (const json &f : ht.value("fields", json::array())) {
            if (!f.is_array() || f.empty() || !f[0].is_string())
                throw InputError("ir: malformed field in header type '" + tname + "'");
            const std::string fname = f[0].get<std::string>();
            if (f.size() < 2 || f[1].is_string())  // width "*" marks a varbit field
                throw UnsupportedError("variable-length header");
            const int width = f[1].get<int>();
            if (width < 1)
                throw InputError("ir: field '" + tname + "." + fname + "' has width " +
                                 std::to_string(width) + " (must be >= 1)");
            tf.fields.emplace_back(fname, width);
        }
        header_types[tname] = tf;
    }

    for (const json &h : doc.value("headers", json::array())) {
        const std::string hname = h.value("name", "");
        const std::string tname = h.value("header_type", "");
        auto it = header_types.find(tname);
        if (it == header_types.end())
            throw InputError("ir: header '" + hname + "' references unknown header type '" +
                             tname + "'");
        const bool metadata = h.value("metadata", false);
        int total = 0;
        for (const auto &[fname, width] : it->second.fields) {
            HeaderField hf{fname, hname, width, metadata};
            if (prog.field_index.count(hf.ref()))
                throw InputError("ir: duplicate field '" + hf.ref() + "'");
            prog.field_index[hf.ref()] = hf;
            prog.fields.push_back(hf);
            total += width;
        }
        prog.header_bits[hname] = total;
    }

    // --- stateful objects ---
    auto parse_externs = [&](const char *section, ExternKind kind, int default_bits) {
        for (const json &r : doc.value(section, json::array())) {
            ExternObject obj;
            obj.name = r.value("name", "");
            obj.kind = kind;
            obj.entries = r.value("size", 1);
            obj.entry_bits = r.value("bitwidth", default_bits);
            prog.externs[obj.name] = obj;
        }
    };
    parse_externs("register_arrays", ExternKind::Register, 32);
    parse_externs("counter_arrays", ExternKind::Counter, 64);
    parse_externs("meter_arrays", ExternKind::Meter, 128);

    // --- actions ---
    for (const json &a : doc.value("actions", json::array())) {
        check_not_atomic(a, "action");
        ActionDef def;
        def.name = a.value("name", "");
        for (const json &rd : a.value("runtime_data", json::array()))
            def.arg_width_total += rd.value("bitwidth", 0);
        for (const json &prim : a.value("primitives", json::array())) {
            PrimitiveEffect eff = primitive_effect(prim, def.name, diags);
            def.reads.insert(eff.reads.begin(), eff.reads.end());
            def.writes.insert(eff.writes.begin(), eff.writes.end());
            for (auto &op : eff.extern_ops) {
                if (!prog.externs.count(op.extern_name))
                    throw InputError("ir: action '" + def.name +
                                     "' references unknown stateful object '" + op.extern_name +
                                     "'");
                def.extern_ops.push_back(std::move(op));
            }
        }
        prog.actions[def.name] = def;
    }

    // --- parsers ---
    for (const json &p : doc.value("parsers", json::array())) {
        RawParser parser;
        parser.name = p.value("name", "parser");
        parser.init_state = p.value("init_state", "");
        for (const json &st : p.value("parse_states", json::array())) {
            ParserState state;
            state.name = st.value("name", "");
            for (const json &op : st.value("parser_ops", json::array())) {
                const std::string opname = op.value("op", "");
                if (opname == "extract") {
                    for (const json &param : op.value("parameters", json::array())) {
                        const std::string ptype = param.value("type", "");
                        if (ptype == "regular") {
                            state.extracted_headers.push_back(param.at("value").get<std::string>());
                        } else if (ptype == "stack" || ptype == "union_stack") {
                            throw UnsupportedError("header stack extraction");
                        }
                    }
                } else if (opname == "extract_VL") {
                    throw UnsupportedError("variable-length header");
                } else if (opname == "set") {
                    note(diags, Diagnostic::info("ir: parser state '" + state.name +
                                                 "' sets metadata; not modeled"));
                } else {
                    note(diags, Diagnostic::warning("ir: unknown parser op '" + opname +
                                                    "' in state '" + state.name + "' ignored"));
                }
            }
            for (const json &k : st.value("transition_key", json::array())) {
                const std::string ktype = k.value("type", "");
                if (ktype == "field") {
                    state.select_fields.push_back(
                        field_ref_from_target(k.at("value"), "parser state '" + state.name + "'"));
                } else {
                    note(diags,
                         Diagnostic::warning("ir: parser state '" + state.name +
                                             "' selects on unsupported key type '" + ktype +
                                             "'; key ignored"));
                }
            }
            for (const json &t : st.value("transitions", json::array())) {
                ParserTransition tr;
                tr.from_state = state.name;
                const json &next = t.contains("next_state") ? t.at("next_state") : json{};
                tr.to_state = next.is_string() ? next.get<std::string>() : kAcceptSink;
                if (t.value("type", "") != "default") {
                    const json &val = t.contains("value") ? t.at("value") : json{};
                    if (val.is_string()) tr.value_hex = val.get<std::string>();
                    const json &mask = t.contains("mask") ? t.at("mask") : json{};
                    if (mask.is_string()) tr.mask_hex = mask.get<std::string>();
                }
                parser.transitions.push_back(tr);
            }
            parser.states.push_back(std::move(state));
        }
        prog.parsers.push_back(std::move(parser));
    }

    // --- pipelines ---
    for (const json &pl : doc.value("pipelines", json::array())) {
        Pipeline pipe;
        pipe.name = pl.value("name", "");
        const json &init = pl.contains("init_table") ? pl.at("init_table") : json{};
        pipe.init_node = init.is_string() ? init.get<std::string>() : "";
        int order = 0;
        for (const json &t : pl.value("tables", json::array())) {
            check_not_atomic(t, "table");
            LogicalTable tab;
            tab.name = t.value("name", "");
            tab.tdg_order = order++;
            tab.max_entries = t.value("max_size", 1024);
            if (tab.max_entries < 1)
                throw InputError("ir: table '" + tab.name + "' has max_size < 1");
            if (tab.max_entries > 1'000'000'000)
                throw InputError("ir: table '" + tab.name + "' has an implausible max_size of " +
                                 std::to_string(tab.max_entries));
            for (const json &k : t.value("key", json::array())) {
                MatchFieldSpec spec;
                spec.kind = parse_match_kind(k.value("match_type", "exact"), tab.name, diags);
                spec.field = field_ref_from_target(k.at("target"), "table '" + tab.name + "'");
                if (!prog.field_index.count(spec.field))
                    throw InputError("ir: table '" + tab.name +
                                     "' matches unresolved field '" + spec.field + "'");
                tab.match_fields.push_back(spec);
            }
            for (const json &an : t.value("actions", json::array())) {
                const std::string aname = an.get<std::string>();
                if (!prog.actions.count(aname))
                    throw InputError("ir: table '" + tab.name + "' references unknown action '" +
                                     aname + "'");
                tab.actions.push_back(aname);
                const ActionDef &def = prog.actions.at(aname);
                for (const auto &op : def.extern_ops) tab.extern_refs.insert(op.extern_name);
                tab.max_action_arg_bits = std::max(tab.max_action_arg_bits, def.arg_width_total);
                int read_bits = 0;
                for (const auto &f : def.reads) {
                    auto fit = prog.field_index.find(f);
                    if (fit != prog.field_index.end()) read_bits += fit->second.width_bits;
                }
                tab.max_action_read_bits = std::max(tab.max_action_read_bits, read_bits);
            }
            if (t.contains("next_tables")) {
                for (const auto &item : t.at("next_tables").items()) {
                    if (item.value().is_string())
                        tab.next_table_map[item.key()] = item.value().get<std::string>();
                    else
                        tab.next_table_map[item.key()] = "";
                }
            }
            if (t.contains("base_default_next") && t.at("base_default_next").is_string())
                tab.next_table_map["__DEFAULT__"] = t.at("base_default_next").get<std::string>();
            for (const auto &a : tab.actions) {
                for (const auto &f : prog.actions.at(a).reads)
                    if (!prog.field_index.count(f))
                        throw InputError("ir: action '" + a + "' reads unresolved field '" + f +
                                         "'");
                for (const auto &f : prog.actions.at(a).writes)
                    if (!prog.field_index.count(f))
                        throw InputError("ir: action '" + a + "' writes unresolved field '" + f +
                                         "'");
            }
            pipe.tables.push_back(std::move(tab));
        }
        for (const json &c : pl.value("conditionals", json::array())) {
            Conditional cond;
            cond.name = c.value("name", "");
            const json &tn = c.contains("true_next") ? c.at("true_next") : json{};
            const json &fn = c.contains("false_next") ? c.at("false_next") : json{};
            cond.true_next = tn.is_string() ? tn.get<std::string>() : "";
            cond.false_next = fn.is_string() ? fn.get<std::string>() : "";
            pipe.conditionals.push_back(std::move(cond));
        }
        prog.pipelines.push_back(std::move(pipe));
    }

    // Sections this backend does not consume.
    const std::set<std::string> consumed = {"program",        "header_types", "headers",
                                            "parsers",        "pipelines",    "actions",
                                            "register_arrays", "counter_arrays", "meter_arrays"};
    const std::set<std::string> known_ignored = {"__meta__",    "errors",      "enums",
                                                 "field_lists", "calculations", "checksums",
                                                 "learn_lists", "extern_instances", "deparsers",
                                                 "force_arith", "field_aliases"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (consumed.count(it.key())) continue;
        if (known_ignored.count(it.key()))
            note(diags, Diagnostic::info("ir: section '" + it.key() + "' not consumed"));
        else
            note(diags, Diagnostic::warning("ir: unknown section '" + it.key() + "' ignored"));
    }
    return prog;
}

}  // namespace

IrProgram parse_ir(const std::string &ir_document, Diagnostics *diags) {
    try {
        return parse_ir_impl(ir_document, diags);
    } catch (const json::exception &e) {
        throw InputError("ir: malformed document: " + std::string(e.what()));
    }
}

// ---------------------------------------------------------------------------
// Parse graph
// ---------------------------------------------------------------------------

ParseGraph build_parse_graph(const IrProgram &program, Diagnostics *diags) {
    if (program.parsers.empty()) throw InputError("ir: program declares no parser");
    const RawParser *parser = &program.parsers.front();
    for (const auto &p : program.parsers)
        if (p.name == "parser") parser = &p;
    if (program.parsers.size() > 1)
        note(diags, Diagnostic::info("ir: multiple parsers; using '" + parser->name + "'"));

    ParseGraph g;
    g.start_node = parser->init_state;
    std::map<std::string, int> node_index;
    std::map<std::string, const ParserState *> state_by_name;
    for (const auto &st : parser->states) {
        ParseGraphNode node;
        node.id = st.name;
        node.header_instances = st.extracted_headers;
        for (const auto &h : st.extracted_headers) {
            auto it = program.header_bits.find(h);
            if (it == program.header_bits.end())
                throw InputError("ir: parser state '" + st.name + "' extracts unknown header '" +
                                 h + "'");
            node.total_header_bits += it->second;
        }
        node_index[node.id] = static_cast<int>(g.nodes.size());
        state_by_name[st.name] = &st;
        g.nodes.push_back(std::move(node));
    }
    if (!node_index.count(g.start_node))
        throw InputError("ir: parser init state '" + g.start_node + "' not found");

    for (const auto &tr : parser->transitions) {
        ParseGraphEdge e;
        e.from = tr.from_state;
        e.to = tr.to_state;
        e.value_hex = tr.value_hex;
        e.mask_hex = tr.mask_hex;
        if (!tr.value_hex.empty()) e.select_fields = state_by_name.at(tr.from_state)->select_fields;
        if (e.to != kAcceptSink && !node_index.count(e.to))
            throw InputError("ir: parser transition to unknown state '" + e.to + "'");
        for (const auto &f : e.select_fields) {
            auto fit = program.field_index.find(f);
            if (fit == program.field_index.end())
                throw InputError("ir: parser state '" + e.from + "' selects on unresolved field '" +
                                 f + "'");
            e.select_widths.push_back(fit->second.width_bits);
        }
        g.edges.push_back(std::move(e));
    }

    // DAG check: depth-first search with colors over the real states.
    enum Color { White, Grey, Black };
    std::vector<Color> color(g.nodes.size(), White);
    std::vector<std::vector<int>> succ(g.nodes.size());
    for (const auto &e : g.edges)
        if (e.to != kAcceptSink) succ[node_index.at(e.from)].push_back(node_index.at(e.to));
    std::function<void(int)> dfs = [&](int u) {
        color[u] = Grey;
        for (int v : succ[u]) {
            if (color[v] == Grey)
                throw RejectionError("parse-graph", "dag", g.nodes[v].id,
                                     "parser state machine contains a cycle through state '" +
                                         g.nodes[v].id + "'");
            if (color[v] == White) dfs(v);
        }
        color[u] = Black;
    };
    for (size_t i = 0; i < g.nodes.size(); ++i)
        if (color[i] == White) dfs(static_cast<int>(i));

    // Reachability is informational only.
    std::vector<bool> reached(g.nodes.size(), false);
    std::function<void(int)> mark = [&](int u) {
        if (reached[u]) return;
        reached[u] = true;
        for (int v : succ[u]) mark(v);
    };
    mark(node_index.at(g.start_node));
    for (size_t i = 0; i < g.nodes.size(); ++i)
        if (!reached[i])
            note(diags, Diagnostic::warning("ir: parser state '" + g.nodes[i].id +
                                            "' is unreachable from the init state"));
    return g;
}

// ---------------------------------------------------------------------------
// Table dependency graph
// ---------------------------------------------------------------------------

namespace {

struct TableSets {
    std::set<FieldRef> match;
    std::set<FieldRef> reads;
    std::set<FieldRef> writes;
};

TableSets table_sets(const LogicalTable &t, const std::map<std::string, ActionDef> &actions) {
    TableSets s;
    for (const auto &m : t.match_fields) s.match.insert(m.field);
    for (const auto &a : t.actions) {
        auto it = actions.find(a);
        if (it == actions.end()) continue;
        s.reads.insert(it->second.reads.begin(), it->second.reads.end());
        s.writes.insert(it->second.writes.begin(), it->second.writes.end());
    }
    return s;
}

bool intersects(const std::set<FieldRef> &a, const std::set<FieldRef> &b) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) ++ia;
        else if (*ib < *ia) ++ib;
        else return true;
    }
    return false;
}

DependencyKind classify_from_sets(const TableSets &a, const TableSets &b,
                                  bool b_directly_follows_a) {
    if (intersects(a.writes, b.match)) return DependencyKind::Match;
    if (intersects(a.writes, b.reads) || intersects(a.writes, b.writes))
        return DependencyKind::Action;
    if (intersects(a.match, b.writes)) return DependencyKind::ReverseMatch;
    if (b_directly_follows_a) return DependencyKind::Successor;
    return DependencyKind::None;
}

}  // namespace

DependencyKind classify_dependency(const LogicalTable &a, const LogicalTable &b,
                                   bool b_directly_follows_a,
                                   const std::map<std::string, ActionDef> &actions) {
    return classify_from_sets(table_sets(a, actions), table_sets(b, actions),
                              b_directly_follows_a);
}

Tdg build_tdg(const IrProgram &program, const std::string &pipeline, Diagnostics *diags) {
    const Pipeline *pipe = program.find_pipeline(pipeline);
    if (!pipe) throw InputError("ir: no pipeline named '" + pipeline + "'");

    Tdg tdg;
    tdg.pipeline = pipeline;
    tdg.tables = pipe->tables;

    std::map<std::string, int> table_index;
    for (size_t i = 0; i < tdg.tables.size(); ++i)
        table_index[tdg.tables[i].name] = static_cast<int>(i);
    std::map<std::string, const Conditional *> cond_index;
    for (const auto &c : pipe->conditionals) cond_index[c.name] = &c;

    // Control-flow graph over tables and conditionals.
    struct Node {
        bool is_table = false;
        int table = -1;
        const Conditional *cond = nullptr;
        std::vector<std::string> next;
    };
    std::map<std::string, Node> cfg;
    for (const auto &t : tdg.tables) {
        Node n;
        n.is_table = true;
        n.table = table_index.at(t.name);
        for (const auto &[key, next] : t.next_table_map)
            if (!next.empty()) n.next.push_back(next);
        std::sort(n.next.begin(), n.next.end());
        n.next.erase(std::unique(n.next.begin(), n.next.end()), n.next.end());
        cfg[t.name] = std::move(n);
    }
    for (const auto &c : pipe->conditionals) {
        Node n;
        n.cond = &c;
        if (!c.true_next.empty()) n.next.push_back(c.true_next);
        if (!c.false_next.empty() && c.false_next != c.true_next) n.next.push_back(c.false_next);
        cfg[c.name] = std::move(n);
    }
    for (const auto &[name, node] : cfg)
        for (const auto &nx : node.next)
            if (!cfg.count(nx))
                throw InputError("ir: pipeline '" + pipeline + "' control flow references unknown node '" +
                                 nx + "' from '" + name + "'");
    if (!pipe->init_node.empty() && !cfg.count(pipe->init_node))
        throw InputError("ir: pipeline '" + pipeline + "' init table '" + pipe->init_node +
                         "' not found");

    // Cycle check over the full control-flow graph.
    {
        enum Color { White, Grey, Black };
        std::map<std::string, Color> color;
        std::function<void(const std::string &)> dfs = [&](const std::string &u) {
            color[u] = Grey;
            for (const auto &v : cfg.at(u).next) {
                if (color[v] == Grey)
                    throw RejectionError("tdg", "dag", v,
                                         "pipeline '" + pipeline +
                                             "' control flow contains a cycle through '" + v + "'");
                if (color[v] == White) dfs(v);
            }
            color[u] = Black;
        };
        for (const auto &[name, _] : cfg)
            if (color[name] == White) dfs(name);
    }

    const int n = static_cast<int>(tdg.tables.size());
    ControlFlowInfo flow;
    flow.direct_successors.resize(n);
    flow.reachable.resize(n);

    // Tables reached from a control-flow name without crossing another table.
    std::function<void(const std::string &, std::set<int> &)> first_tables =
        [&](const std::string &name, std::set<int> &out) {
            const Node &node = cfg.at(name);
            if (node.is_table) {
                out.insert(node.table);
                return;
            }
            for (const auto &nx : node.next) first_tables(nx, out);
        };
    for (const auto &t : tdg.tables) {
        const int i = table_index.at(t.name);
        for (const auto &nx : cfg.at(t.name).next) first_tables(nx, flow.direct_successors[i]);
        flow.direct_successors[i].erase(i);
    }

    // Transitive closure over tables, in reverse topological order.
    {
        std::vector<int> topo;
        std::map<std::string, int> indeg;
        for (const auto &[name, _] : cfg) indeg[name] = 0;
        for (const auto &[name, node] : cfg)
            for (const auto &nx : node.next) indeg[nx]++;
        std::vector<std::string> queue;
        for (const auto &[name, d] : indeg)
            if (d == 0) queue.push_back(name);
        std::vector<std::string> order;
        while (!queue.empty()) {
            std::string u = queue.front();
            queue.erase(queue.begin());
            order.push_back(u);
            for (const auto &v : cfg.at(u).next)
                if (--indeg[v] == 0) queue.push_back(v);
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const Node &node = cfg.at(*it);
            if (!node.is_table) continue;
            const int i = node.table;
            for (int s : flow.direct_successors[i]) {
                flow.reachable[i].insert(s);
                flow.reachable[i].insert(flow.reachable[s].begin(), flow.reachable[s].end());
            }
        }
    }

    // Reachability from the pipeline entry, for dead-table diagnostics.
    if (!pipe->init_node.empty()) {
        std::set<int> live;
        first_tables(pipe->init_node, live);
        std::set<int> all_live = live;
        for (int t : live)
            all_live.insert(flow.reachable[t].begin(), flow.reachable[t].end());
        for (int i = 0; i < n; ++i)
            if (!all_live.count(i))
                note(diags, Diagnostic::warning("ir: table '" + tdg.tables[i].name +
                                                "' is unreachable in pipeline '" + pipeline + "'"));
    }

    // Classify every related ordered pair; keep one edge carrying all kinds.
    std::vector<TableSets> sets;
    sets.reserve(n);
    for (const auto &t : tdg.tables) sets.push_back(table_sets(t, program.actions));
    for (int i = 0; i < n; ++i) {
        for (int j : flow.reachable[i]) {
            const bool direct = flow.direct_successors[i].count(j) > 0;
            std::set<DependencyKind> kinds;
            if (intersects(sets[i].writes, sets[j].match)) kinds.insert(DependencyKind::Match);
            if (intersects(sets[i].writes, sets[j].reads) ||
                intersects(sets[i].writes, sets[j].writes))
                kinds.insert(DependencyKind::Action);
            if (intersects(sets[i].match, sets[j].writes))
                kinds.insert(DependencyKind::ReverseMatch);
            if (direct) kinds.insert(DependencyKind::Successor);
            if (kinds.empty()) continue;
            tdg.edges.push_back({i, j, std::move(kinds)});
        }
    }

    // Stateful sharing groups: one per extern with two or more users.
    for (const auto &[ename, _] : program.externs) {
        std::set<int> users;
        for (int i = 0; i < n; ++i)
            if (tdg.tables[i].extern_refs.count(ename)) users.insert(i);
        if (!users.empty()) tdg.extern_users[ename] = users;
        if (users.size() >= 2) tdg.stateful_groups.push_back(users);
    }
    return tdg;
}

}  // namespace rmtmap
