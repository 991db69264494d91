// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Builders for synthetic IR documents and in-memory dependency graphs,
// shared by the unit tests, the acceptance suite and the fixture generator.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rmtmap/ir.hpp"
#include "rmtmap/tdg_map.hpp"

namespace synth {

// Deterministic xorshift generator so results do not depend on the
// standard library's distribution implementations.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dull;
    }

    // Uniform in [0, n).
    uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }

    int range(int lo, int hi) { return lo + static_cast<int>(below(hi - lo + 1)); }

  private:
    uint64_t state_;
};

// ---------------------------------------------------------------------------
// JSON IR builder (frontend document shape)
// ---------------------------------------------------------------------------

class IrBuilder {
  public:
    using json = nlohmann::ordered_json;

    explicit IrBuilder(const std::string &program_name);

    IrBuilder &header(const std::string &instance, bool metadata,
                      const std::vector<std::pair<std::string, int>> &fields);

    IrBuilder &parser_state(const std::string &name, const std::vector<std::string> &extracts,
                            const std::vector<std::string> &select_fields = {});
    // to == "" means accept; value == "" means default transition.
    IrBuilder &transition(const std::string &from, const std::string &value,
                          const std::string &to, const std::string &mask = "");
    IrBuilder &init_state(const std::string &name);

    IrBuilder &register_array(const std::string &name, long long size, int bitwidth);
    IrBuilder &counter_array(const std::string &name, long long size);

    // Primitive helpers; a primitive is the raw JSON object the frontend
    // emits. field("h.f") and const_hex("0x1") build parameters.
    static json field(const std::string &ref);
    static json const_hex(const std::string &hex);
    static json runtime_arg(int index);
    static json register_ref(const std::string &name);
    static json primitive(const std::string &op, const std::vector<json> &params);

    IrBuilder &action(const std::string &name, const std::vector<int> &arg_widths,
                      const std::vector<json> &primitives);

    struct TableSpec {
        std::string name;
        std::vector<std::pair<std::string, std::string>> key;  // (field, match kind)
        long long max_size = 1024;
        std::vector<std::string> actions;
        std::vector<std::pair<std::string, std::string>> next;  // action -> next ("" = exit)
        std::string base_default_next;  // "" = exit
    };
    IrBuilder &table(const std::string &pipeline, const TableSpec &spec);
    IrBuilder &conditional(const std::string &pipeline, const std::string &name,
                           const std::string &true_next, const std::string &false_next);
    IrBuilder &init_table(const std::string &pipeline, const std::string &name);

    json build() const;
    std::string str() const;

  private:
    json &pipeline_obj(const std::string &name);

    json doc_;
};

// ---------------------------------------------------------------------------
// Direct StrictDag fixtures (bypass the JSON path where the test wants
// full control over table shapes and edge kinds)
// ---------------------------------------------------------------------------

struct DagFixture {
    std::map<rmtmap::FieldRef, rmtmap::HeaderField> fields;
    std::map<std::string, rmtmap::ExternObject> externs;
    rmtmap::StrictDag dag;

    // Registers a metadata field and returns its ref.
    rmtmap::FieldRef add_field(const std::string &name, int width);

    struct TableParams {
        long long entries = 16;
        rmtmap::MatchKind kind = rmtmap::MatchKind::Exact;
        std::vector<int> key_widths = {16};  // empty = keyless
        int action_arg_bits = 0;
        int action_read_bits = 0;
        int num_actions = 1;
        std::vector<std::string> extern_refs;
    };
    // Returns the table index.
    int add_table(const std::string &name, const TableParams &params);

    void add_edge(int from, int to, rmtmap::DependencyKind kind);
};

// A random strict DAG over n tables: every ordered pair (i, j < i) gets an
// edge with probability ~edge_density, with a random kind. Table shapes are
// randomized within `sizes` to keep instances placeable most of the time.
struct RandomDagParams {
    int tables = 8;
    int edge_percent = 30;  // chance per ordered pair
    long long max_entries = 4096;
    bool allow_externs = false;
};
DagFixture random_dag(Rng &rng, const RandomDagParams &params);

// A layered synthetic program document with the requested TDG shape:
// `tables` nodes, a control spine plus forks, and long-range data
// dependencies to reach `edges` reduced-TDG edges.
std::string chain_program_document(const std::string &name, int tables, int edges,
                                   long long table_entries = 256);

}  // namespace synth
