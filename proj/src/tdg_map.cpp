// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rmtmap/tdg_map.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <tuple>

namespace rmtmap {

namespace {

long long div_ceil(long long a, long long b) { return (a + b - 1) / b; }

long long round_up(long long a, long long multiple) {
    return multiple <= 1 ? a : div_ceil(a, multiple) * multiple;
}

}  // namespace

MemoryFootprint &MemoryFootprint::operator+=(const MemoryFootprint &o) {
    tcam_blocks += o.tcam_blocks;
    sram_match_blocks += o.sram_match_blocks;
    sram_action_blocks += o.sram_action_blocks;
    sram_stateful_blocks += o.sram_stateful_blocks;
    vliw_slots += o.vliw_slots;
    tcam_crossbar_bits += o.tcam_crossbar_bits;
    sram_crossbar_bits += o.sram_crossbar_bits;
    action_crossbar_bits += o.action_crossbar_bits;
    return *this;
}

StrictDag reduce_dependencies(const Tdg &tdg) {
    StrictDag dag;
    dag.pipeline = tdg.pipeline;
    dag.tables = tdg.tables;
    dag.stateful_groups = tdg.stateful_groups;
    dag.extern_users = tdg.extern_users;
    for (const auto &e : tdg.edges) dag.edges.push_back({e.from, e.to, e.strictest()});
    return dag;
}

namespace {

std::vector<std::set<int>> adjacency(const StrictDag &dag) {
    std::vector<std::set<int>> adj(dag.tables.size());
    for (const auto &e : dag.edges) adj[e.from].insert(e.to);
    return adj;
}

std::vector<std::set<int>> transitive_closure(const StrictDag &dag) {
    const int n = static_cast<int>(dag.tables.size());
    auto adj = adjacency(dag);
    std::vector<std::set<int>> reach(n);
    // Reverse topological accumulation.
    std::vector<int> indeg(n, 0);
    for (const auto &e : dag.edges) indeg[e.to]++;
    std::vector<int> order;
    std::vector<int> q;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) q.push_back(i);
    while (!q.empty()) {
        int u = q.front();
        q.erase(q.begin());
        order.push_back(u);
        for (int v : adj[u])
            if (--indeg[v] == 0) q.push_back(v);
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        for (int v : adj[*it]) {
            reach[*it].insert(v);
            reach[*it].insert(reach[v].begin(), reach[v].end());
        }
    }
    return reach;
}

}  // namespace

StrictDag apply_stateful_policy(const StrictDag &dag, StatefulPolicy policy) {
    if (policy == StatefulPolicy::Colocate) return dag;

    StrictDag out = dag;
    out.stateful_groups.clear();
    std::map<std::pair<int, int>, size_t> edge_index;
    for (size_t i = 0; i < out.edges.size(); ++i)
        edge_index[{out.edges[i].from, out.edges[i].to}] = i;

    for (const auto &[ename, users] : dag.extern_users) {
        if (users.size() < 2) continue;
        std::vector<int> chain(users.begin(), users.end());
        std::sort(chain.begin(), chain.end(), [&](int a, int b) {
            return out.tables[a].tdg_order < out.tables[b].tdg_order;
        });
        for (size_t i = 0; i + 1 < chain.size(); ++i) {
            const int a = chain[i];
            const int b = chain[i + 1];
            auto reach = transitive_closure(out);
            if (reach[b].count(a))
                throw RejectionError("tdg", "stateful-serialization", ename,
                                     "cannot serialize tables sharing '" + ename +
                                         "': control flow orders '" + out.tables[b].name +
                                         "' before '" + out.tables[a].name + "'");
            auto it = edge_index.find({a, b});
            if (it != edge_index.end()) {
                if (stricter(DependencyKind::Action, out.edges[it->second].kind))
                    out.edges[it->second].kind = DependencyKind::Action;
            } else {
                edge_index[{a, b}] = out.edges.size();
                out.edges.push_back({a, b, DependencyKind::Action});
            }
        }
    }
    return out;
}

LevelAssignment assign_levels(const StrictDag &dag) {
    const int n = static_cast<int>(dag.tables.size());
    LevelAssignment la;
    la.level.assign(n, 0);

    std::vector<int> indeg(n, 0);
    std::vector<std::vector<std::pair<int, DependencyKind>>> out(n);
    for (const auto &e : dag.edges) {
        indeg[e.to]++;
        out[e.from].push_back({e.to, e.kind});
    }
    std::vector<int> q;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) q.push_back(i);
    int visited = 0;
    while (!q.empty()) {
        int u = q.front();
        q.erase(q.begin());
        visited++;
        for (const auto &[v, kind] : out[u]) {
            const int need = la.level[u] + (is_strict(kind) ? 1 : 0);
            la.level[v] = std::max(la.level[v], need);
            if (--indeg[v] == 0) q.push_back(v);
        }
    }
    if (visited != n)
        throw RejectionError("tdg", "dag", dag.pipeline, "table dependency graph is cyclic");
    for (int i = 0; i < n; ++i) la.max_level = std::max(la.max_level, la.level[i]);
    return la;
}

int tcam_blocks_needed(const LogicalTable &table, const StageSpec &s,
                       const std::map<FieldRef, HeaderField> &fields) {
    const int width = table.match_width_bits(fields);
    if (width == 0) return 0;
    if (s.tcam_width < 1 || s.tcam_depth < 1)
        throw InputError("stage TCAM geometry undefined while sizing table '" + table.name + "'");
    return static_cast<int>(div_ceil(width, s.tcam_width) *
                            div_ceil(table.max_entries, s.tcam_depth));
}

namespace {

// Entries one packing unit of u blocks holds, 0 when the entry does not fit.
long long entries_per_unit(int u, int entry_width, const StageSpec &s) {
    if (entry_width <= 0 || static_cast<long long>(u) * s.sram_width < entry_width) return 0;
    return (static_cast<long long>(u) * s.sram_width / entry_width) * s.sram_depth;
}

// Minimal blocks for `entries` entries of `entry_width` bits, trying every
// packing unit size up to p_f. way_multiple > 1 rounds the block count up
// to whole cuckoo ways. Returns -1 when no unit size fits one entry.
long long blocks_for_entries(long long entries, int entry_width, const StageSpec &s, int p_f,
                             int way_multiple) {
    if (entries <= 0 || entry_width <= 0) return 0;
    long long best = -1;
    for (int u = 1; u <= p_f; ++u) {
        const long long epu = entries_per_unit(u, entry_width, s);
        if (epu == 0) continue;
        const long long units = div_ceil(entries, epu);
        const long long blocks = round_up(units * u, way_multiple);
        if (best < 0 || blocks < best) best = blocks;
    }
    return best;
}

}  // namespace

MemoryFootprint sram_blocks_needed(const LogicalTable &table, const StageSpec &s,
                                   int packing_factor, const ActionModeSpec &action_mode,
                                   const std::map<FieldRef, HeaderField> &fields,
                                   const std::map<std::string, ExternObject> &externs,
                                   int pointer_overhead_bits) {
    MemoryFootprint fp;
    const int p_f = std::max(1, packing_factor);

    if (!table.match_fields.empty() && !table.has_non_exact_match()) {
        const int entry_width = table.match_width_bits(fields) + pointer_overhead_bits;
        const long long blocks =
            blocks_for_entries(table.max_entries, entry_width, s, p_f, s.hash_ways);
        if (blocks < 0)
            throw RejectionError("tdg", "sram-packing", table.name,
                                 "match entry of table '" + table.name + "' (" +
                                     std::to_string(entry_width) + "b) is wider than a packing unit (" +
                                     std::to_string(p_f * s.sram_width) + "b)");
        fp.sram_match_blocks = static_cast<int>(blocks);
    }

    if (table.max_action_arg_bits > 0) {
        const long long entries = action_mode.mode == ActionEntryMode::PerEntry
                                      ? table.max_entries
                                      : action_mode.fixed_entries;
        const long long blocks =
            blocks_for_entries(entries, table.max_action_arg_bits, s, p_f, 1);
        if (blocks < 0)
            throw RejectionError("tdg", "sram-packing", table.name,
                                 "action entry of table '" + table.name + "' (" +
                                     std::to_string(table.max_action_arg_bits) +
                                     "b) is wider than a packing unit (" +
                                     std::to_string(p_f * s.sram_width) + "b)");
        fp.sram_action_blocks = static_cast<int>(blocks);
    }

    const long long block_bits = static_cast<long long>(s.sram_width) * s.sram_depth;
    for (const auto &ename : table.extern_refs) {
        auto it = externs.find(ename);
        if (it == externs.end()) continue;
        if (it->second.total_bits() <= 0) continue;
        if (block_bits <= 0)
            throw RejectionError("tdg", "sram-blocks(stateful)", ename,
                                 "stateful object '" + ename +
                                     "' needs SRAM but the stage has none");
        fp.sram_stateful_blocks += static_cast<int>(div_ceil(it->second.total_bits(), block_bits));
    }
    return fp;
}

PipelineBudget::PipelineBudget(const HardwareSpec &spec) {
    stages.resize(spec.num_stages);
    for (auto &st : stages) {
        st.tcam_blocks = spec.stage.tcam_blocks;
        st.shared = !spec.stage.partitions.has_value();
        if (st.shared) {
            st.sram_shared_blocks = spec.stage.sram_blocks;
        } else {
            st.sram_match_blocks = spec.stage.partitions->match_blocks;
            st.sram_action_blocks = spec.stage.partitions->action_blocks;
            st.sram_stateful_blocks = spec.stage.partitions->stateful_blocks;
        }
        st.vliw_slots = spec.stage.vliw_slots;
        st.tcam_crossbar_bits = spec.stage.tcam_crossbar_bits;
        st.sram_crossbar_bits = spec.stage.sram_crossbar_bits;
        st.action_crossbar_bits = spec.stage.action_crossbar_bits;
    }
}

// ---------------------------------------------------------------------------
// Placement
// ---------------------------------------------------------------------------

namespace {

struct TableSizing {
    int key_bits = 0;
    bool non_exact = false;
    bool keyless = false;
    int match_entry_width = 0;  // SRAM entry: key + pointer
    int vliw = 0;
    int acb_bits = 0;
    long long action_entries = 0;
    bool action_fixed = false;
    std::vector<std::string> externs;  // sorted
    bool single_stage = false;         // pinned: accesses stateful memory
};

struct PendingCharge {
    long long stateful_blocks = 0;  // externs newly hosted by this placement
};

class Placer {
  public:
    Placer(const StrictDag &dag, const LevelAssignment &levels, const HardwareSpec &spec,
           const std::map<FieldRef, HeaderField> &fields,
           const std::map<std::string, ExternObject> &externs, const MapperOptions &opts,
           PipelineBudget &budget)
        : dag_(dag), levels_(levels), spec_(spec), fields_(fields), externs_(externs),
          opts_(opts), budget_(budget) {
        p_f_ = opts.packing_factor > 0 ? opts.packing_factor : spec.packing_factor;
        sizings_.reserve(dag.tables.size());
        for (const auto &t : dag.tables) sizings_.push_back(size_table(t));
        first_stage_.assign(dag.tables.size(), -1);
        last_stage_.assign(dag.tables.size(), -1);
    }

    TdgMapping run();

  private:
    TableSizing size_table(const LogicalTable &t) const {
        TableSizing ts;
        ts.key_bits = t.match_width_bits(fields_);
        ts.keyless = t.match_fields.empty();
        ts.non_exact = t.has_non_exact_match();
        ts.match_entry_width = ts.key_bits + opts_.match_pointer_overhead_bits;
        ts.vliw = static_cast<int>(t.actions.size());
        ts.acb_bits = t.max_action_read_bits;
        auto mode_it = opts_.per_table_action_mode.find(t.name);
        const ActionModeSpec &mode =
            mode_it != opts_.per_table_action_mode.end() ? mode_it->second : opts_.action_mode;
        ts.action_fixed = mode.mode == ActionEntryMode::Fixed;
        ts.action_entries = ts.action_fixed ? mode.fixed_entries : t.max_entries;
        ts.externs.assign(t.extern_refs.begin(), t.extern_refs.end());
        ts.single_stage = !ts.externs.empty();
        return ts;
    }

    long long stateful_blocks_for(const std::vector<std::string> &enames) const {
        const long long block_bits =
            static_cast<long long>(spec_.stage.sram_width) * spec_.stage.sram_depth;
        long long blocks = 0;
        for (const auto &e : enames) {
            auto it = externs_.find(e);
            if (it == externs_.end() || it->second.total_bits() <= 0) continue;
            if (block_bits <= 0)
                throw RejectionError("tdg", "sram-blocks(stateful)", e,
                                     "stateful object '" + e +
                                         "' needs SRAM but the stage has none");
            blocks += div_ceil(it->second.total_bits(), block_bits);
        }
        return blocks;
    }

    long long action_blocks(long long entries, int width) const {
        if (width <= 0 || entries <= 0) return 0;
        const long long b = blocks_for_entries(entries, width, spec_.stage, p_f_, 1);
        return b < 0 ? 0 : b;  // width guard raised earlier by sram_blocks_needed
    }

    // Free SRAM pool the given role draws from, in blocks.
    static long long pool_free(const PipelineBudget::Stage &st, int role /*0=m,1=a,2=s*/) {
        if (st.shared) return st.sram_shared_blocks;
        switch (role) {
            case 0: return st.sram_match_blocks;
            case 1: return st.sram_action_blocks;
            default: return st.sram_stateful_blocks;
        }
    }

    // Best-effort share of table `ti` in stage `stage`: as many of the
    // `entries` remaining entries as fit, honoring the per-stage gates.
    // `charge` carries stateful blocks the table must host here. Returns
    // entries placed; fills `share` on success.
    long long stage_share(int ti, const PipelineBudget::Stage &st, long long entries,
                          const PendingCharge &charge, StageShare &share,
                          std::string *blocker) const {
        const TableSizing &ts = sizings_[ti];
        auto set_blocker = [&](const std::string &r) {
            if (blocker) *blocker = r;
        };

        if (ts.vliw > st.vliw_slots) {
            set_blocker("vliw-slots");
            return 0;
        }
        if (ts.acb_bits > st.action_crossbar_bits) {
            set_blocker("action-crossbar");
            return 0;
        }

        long long sram_budget = st.shared ? st.sram_shared_blocks
                                          : 0;  // per-role handled below for partitioned
        long long free_m = pool_free(st, 0);
        long long free_a = pool_free(st, 1);
        long long free_s = pool_free(st, 2);
        if (charge.stateful_blocks > 0) {
            if (st.shared) {
                if (charge.stateful_blocks > sram_budget) {
                    set_blocker("sram-blocks(stateful)");
                    return 0;
                }
                sram_budget -= charge.stateful_blocks;
                free_m = free_a = sram_budget;
            } else {
                if (charge.stateful_blocks > free_s) {
                    set_blocker("sram-blocks(stateful)");
                    return 0;
                }
            }
        } else if (st.shared) {
            free_m = free_a = sram_budget;
        }

        const long long action_total = ts.action_entries;
        auto action_chunk = [&](long long match_entries_here) -> long long {
            if (match_entries_here <= 0) return 0;
            if (ts.action_fixed) return action_blocks(action_total, dag_tables_arg_bits(ti));
            return action_blocks(match_entries_here, dag_tables_arg_bits(ti));
        };

        long long e_sram = 0;
        long long mb = 0;
        long long e_tcam = 0;
        long long tb = 0;
        long long ab = 0;

        if (ts.keyless) {
            // Direct-action table: executes in one stage, no match memory.
            ab = action_chunk(entries);
            const long long need = ab;
            const long long have = st.shared ? free_m : free_a;
            if (need > have) {
                set_blocker("sram-blocks(action)");
                return 0;
            }
            e_sram = entries;
        } else if (ts.non_exact) {
            // Ternary/lpm/range: TCAM match, SRAM action entries.
            if (ts.key_bits > st.tcam_crossbar_bits) {
                set_blocker("tcam-crossbar");
                return 0;
            }
            const long long pool = st.shared ? free_m : free_a;
            e_tcam = max_tcam_entries(ti, st, entries, pool, &tb, &ab, 0, action_chunk);
            if (e_tcam == 0) {
                set_blocker("tcam-blocks");
                return 0;
            }
        } else {
            // Exact: SRAM hash units first, spill into TCAM when SRAM runs out.
            const bool scb_ok = ts.key_bits <= st.sram_crossbar_bits;
            if (scb_ok) {
                e_sram = max_sram_entries(ti, entries, free_m, free_a, st.shared, &mb, &ab,
                                          action_chunk);
            }
            if (e_sram < entries) {
                const bool tcb_ok = ts.key_bits <= st.tcam_crossbar_bits;
                if (tcb_ok) {
                    long long free_a_left = st.shared ? free_m - mb - ab : free_a - ab;
                    long long tb2 = 0;
                    long long ab2 = 0;
                    e_tcam = max_tcam_entries(ti, st, entries - e_sram, free_a_left, &tb2, &ab2,
                                              e_sram, action_chunk);
                    tb = tb2;
                    ab += ab2;
                }
            }
            if (e_sram + e_tcam == 0) {
                set_blocker(scb_ok ? "sram-blocks(match)" : "sram-crossbar");
                return 0;
            }
        }

        share.entries_sram = e_sram;
        share.entries_tcam = e_tcam;
        share.footprint.tcam_blocks = static_cast<int>(tb);
        share.footprint.sram_match_blocks = static_cast<int>(mb);
        share.footprint.sram_action_blocks = static_cast<int>(ab);
        share.footprint.sram_stateful_blocks = static_cast<int>(charge.stateful_blocks);
        share.footprint.vliw_slots = ts.vliw;
        share.footprint.tcam_crossbar_bits = e_tcam > 0 ? ts.key_bits : 0;
        share.footprint.sram_crossbar_bits = e_sram > 0 && !ts.keyless ? ts.key_bits : 0;
        share.footprint.action_crossbar_bits = ts.acb_bits;
        return e_sram + e_tcam;
    }

    int dag_tables_arg_bits(int ti) const { return dag_.tables[ti].max_action_arg_bits; }

    // Max exact-match entries whose match units plus action blocks fit the
    // SRAM pool(s). Binary search; block costs are monotone in entries.
    long long max_sram_entries(int ti, long long wanted, long long free_m, long long free_a,
                               bool shared, long long *mb, long long *ab,
                               const std::function<long long(long long)> &action_chunk) const {
        const TableSizing &ts = sizings_[ti];
        auto fits = [&](long long e) {
            if (e == 0) return true;
            const long long m = blocks_for_entries(e, ts.match_entry_width, spec_.stage, p_f_,
                                                   spec_.stage.hash_ways);
            if (m < 0) return false;
            const long long a = action_chunk(e);
            if (shared) return m + a <= free_m;
            return m <= free_m && a <= free_a;
        };
        long long lo = 0;
        long long hi = wanted;
        while (lo < hi) {
            const long long mid = lo + (hi - lo + 1) / 2;
            if (fits(mid)) lo = mid;
            else hi = mid - 1;
        }
        *mb = lo > 0 ? blocks_for_entries(lo, ts.match_entry_width, spec_.stage, p_f_,
                                          spec_.stage.hash_ways)
                     : 0;
        *ab = lo > 0 ? action_chunk(lo) : 0;
        return lo;
    }

    // Max TCAM entries given free TCAM blocks and an SRAM allowance for the
    // extra action blocks they require beyond `already` entries.
    long long max_tcam_entries(int ti, const PipelineBudget::Stage &st, long long wanted,
                               long long sram_allowance, long long *tb, long long *ab,
                               long long already,
                               const std::function<long long(long long)> &action_chunk) const {
        const TableSizing &ts = sizings_[ti];
        if (st.tcam_blocks <= 0 || spec_.stage.tcam_width < 1 || spec_.stage.tcam_depth < 1) {
            *tb = 0;
            *ab = 0;
            return 0;
        }
        const long long wb = div_ceil(std::max(ts.key_bits, 1), spec_.stage.tcam_width);
        auto fits = [&](long long e) {
            if (e == 0) return true;
            const long long t = wb * div_ceil(e, spec_.stage.tcam_depth);
            if (t > st.tcam_blocks) return false;
            const long long extra = action_chunk(already + e) - action_chunk(already);
            return extra <= sram_allowance;
        };
        long long lo = 0;
        long long hi = wanted;
        while (lo < hi) {
            const long long mid = lo + (hi - lo + 1) / 2;
            if (fits(mid)) lo = mid;
            else hi = mid - 1;
        }
        *tb = lo > 0 ? wb * div_ceil(lo, spec_.stage.tcam_depth) : 0;
        *ab = lo > 0 ? action_chunk(already + lo) - action_chunk(already) : 0;
        return lo;
    }

    void commit_share(int stage, const StageShare &share) {
        PipelineBudget::Stage &st = budget_.stages[stage];
        st.tcam_blocks -= share.footprint.tcam_blocks;
        if (st.shared) {
            st.sram_shared_blocks -= share.footprint.sram_match_blocks +
                                     share.footprint.sram_action_blocks +
                                     share.footprint.sram_stateful_blocks;
        } else {
            st.sram_match_blocks -= share.footprint.sram_match_blocks;
            st.sram_action_blocks -= share.footprint.sram_action_blocks;
            st.sram_stateful_blocks -= share.footprint.sram_stateful_blocks;
        }
        st.vliw_slots -= share.footprint.vliw_slots;
        st.tcam_crossbar_bits -= share.footprint.tcam_crossbar_bits;
        st.sram_crossbar_bits -= share.footprint.sram_crossbar_bits;
        st.action_crossbar_bits -= share.footprint.action_crossbar_bits;
    }

    int min_stage_for(int ti) const {
        int s = 0;
        for (const auto &e : dag_.edges) {
            if (e.to != ti || first_stage_[e.from] < 0) continue;
            const int need = last_stage_[e.from] + (is_strict(e.kind) ? 1 : 0);
            s = std::max(s, need);
        }
        return s;
    }

    int max_stage_bound(int ti) const {
        int bound = spec_.num_stages - 1;
        for (const auto &e : dag_.edges) {
            if (e.from != ti || first_stage_[e.to] < 0) continue;
            const int limit = first_stage_[e.to] - (is_strict(e.kind) ? 1 : 0);
            bound = std::min(bound, limit);
        }
        return bound;
    }

    // Places table `ti` starting no earlier than min_stage, spanning
    // consecutive stages. Throws on failure.
    TablePlacement place_single(int ti, const PendingCharge &charge) {
        const LogicalTable &t = dag_.tables[ti];
        const TableSizing &ts = sizings_[ti];
        const int lo = min_stage_for(ti);
        const int hi = max_stage_bound(ti);
        std::string blocker = "stage-capacity";

        for (int s0 = lo; s0 <= hi; ++s0) {
            long long remaining = t.max_entries;
            std::vector<StageShare> shares;
            for (int s = s0; s <= hi && remaining > 0; ++s) {
                if (ts.single_stage && s != s0) break;
                StageShare share;
                share.stage = s;
                const long long placed = stage_share(ti, budget_.stages[s], remaining,
                                                     s == s0 ? charge : PendingCharge{}, share,
                                                     &blocker);
                if (placed == 0) break;  // contiguity would break
                remaining -= placed;
                shares.push_back(std::move(share));
            }
            if (remaining > 0) continue;
            TablePlacement placement;
            placement.table = t.name;
            placement.first_stage = shares.front().stage;
            placement.last_stage = shares.back().stage;
            placement.shares = std::move(shares);
            for (const auto &sh : placement.shares) commit_share(sh.stage, sh);
            first_stage_[ti] = placement.first_stage;
            last_stage_[ti] = placement.last_stage;
            return placement;
        }
        throw RejectionError("tdg", blocker, t.name,
                             "pipeline exhausted: table '" + t.name + "' does not fit stages " +
                                 std::to_string(lo) + ".." + std::to_string(hi) + " (" + blocker +
                                 ")");
    }

    // Places a co-location group atomically into one stage.
    std::vector<std::pair<int, TablePlacement>> place_group(const std::vector<int> &members,
                                                            const std::vector<std::string> &externs) {
        int lo = 0;
        int hi = spec_.num_stages - 1;
        for (int ti : members) {
            lo = std::max(lo, min_stage_for(ti));
            hi = std::min(hi, max_stage_bound(ti));
        }
        for (const auto &e : dag_.edges) {
            const bool from_in = std::find(members.begin(), members.end(), e.from) != members.end();
            const bool to_in = std::find(members.begin(), members.end(), e.to) != members.end();
            if (from_in && to_in && is_strict(e.kind))
                throw RejectionError("tdg", "stateful-colocation", dag_.tables[e.to].name,
                                     "tables '" + dag_.tables[e.from].name + "' and '" +
                                         dag_.tables[e.to].name +
                                         "' share stateful memory but have a " +
                                         std::string(to_string(e.kind)) + " dependency");
        }

        std::string blocker = "stage-capacity";
        for (int s = lo; s <= hi; ++s) {
            PipelineBudget::Stage scratch = budget_.stages[s];
            std::vector<std::pair<int, TablePlacement>> placed;
            bool ok = true;
            for (size_t mi = 0; mi < members.size(); ++mi) {
                const int ti = members[mi];
                PendingCharge charge;
                if (mi == 0) charge.stateful_blocks = stateful_blocks_for(externs);
                StageShare share;
                share.stage = s;
                const long long got =
                    stage_share(ti, scratch, dag_.tables[ti].max_entries, charge, share, &blocker);
                if (got < dag_.tables[ti].max_entries) {
                    ok = false;
                    break;
                }
                // Deduct from the scratch stage for the next member.
                PipelineBudget::Stage &st = scratch;
                st.tcam_blocks -= share.footprint.tcam_blocks;
                if (st.shared)
                    st.sram_shared_blocks -= share.footprint.sram_total();
                else {
                    st.sram_match_blocks -= share.footprint.sram_match_blocks;
                    st.sram_action_blocks -= share.footprint.sram_action_blocks;
                    st.sram_stateful_blocks -= share.footprint.sram_stateful_blocks;
                }
                st.vliw_slots -= share.footprint.vliw_slots;
                st.tcam_crossbar_bits -= share.footprint.tcam_crossbar_bits;
                st.sram_crossbar_bits -= share.footprint.sram_crossbar_bits;
                st.action_crossbar_bits -= share.footprint.action_crossbar_bits;

                TablePlacement placement;
                placement.table = dag_.tables[ti].name;
                placement.first_stage = placement.last_stage = s;
                placement.shares = {share};
                placed.emplace_back(ti, std::move(placement));
            }
            if (!ok) continue;
            for (auto &[ti, placement] : placed) {
                commit_share(s, placement.shares.front());
                first_stage_[ti] = last_stage_[ti] = s;
            }
            return placed;
        }
        std::string names;
        for (int ti : members) names += (names.empty() ? "" : ",") + dag_.tables[ti].name;
        throw RejectionError("tdg", blocker, names,
                             "stateful co-location infeasible: tables {" + names +
                                 "} do not fit one stage (" + blocker + ")");
    }

    const StrictDag &dag_;
    const LevelAssignment &levels_;
    const HardwareSpec &spec_;
    const std::map<FieldRef, HeaderField> &fields_;
    const std::map<std::string, ExternObject> &externs_;
    const MapperOptions &opts_;
    PipelineBudget &budget_;
    int p_f_ = 1;
    std::vector<TableSizing> sizings_;
    std::vector<int> first_stage_;
    std::vector<int> last_stage_;
};

TdgMapping Placer::run() {
    const int n = static_cast<int>(dag_.tables.size());
    TdgMapping mapping;
    mapping.pipeline = dag_.pipeline;
    mapping.placements.resize(n);
    mapping.per_stage.assign(spec_.num_stages, MemoryFootprint{});
    if (n == 0) return mapping;

    // Level-major order. Within a level, weak edges between same-level
    // tables fix the relative order (the successor must not land in an
    // earlier stage than its predecessor); among the ready tables,
    // non-exact tables go first and ties break by first appearance in
    // the TDG.
    std::vector<int> order;
    order.reserve(n);
    {
        std::map<int, std::vector<int>> by_level;
        for (int i = 0; i < n; ++i) by_level[levels_.level[i]].push_back(i);
        for (auto &[level, members] : by_level) {
            std::map<int, int> indeg;
            for (int m : members) indeg[m] = 0;
            for (const auto &e : dag_.edges)
                if (!is_strict(e.kind) && indeg.count(e.from) && indeg.count(e.to) &&
                    e.from != e.to)
                    indeg[e.to]++;
            auto key = [&](int t) {
                return std::tuple<int, int, int>(sizings_[t].non_exact ? 0 : 1,
                                                 dag_.tables[t].tdg_order, t);
            };
            std::set<std::tuple<int, int, int>> ready;
            for (const auto &[t, d] : indeg)
                if (d == 0) ready.insert(key(t));
            while (!ready.empty()) {
                const int t = std::get<2>(*ready.begin());
                ready.erase(ready.begin());
                order.push_back(t);
                for (const auto &e : dag_.edges)
                    if (e.from == t && !is_strict(e.kind) && indeg.count(e.to) && e.to != t)
                        if (--indeg[e.to] == 0) ready.insert(key(e.to));
            }
        }
    }

    // Union-find over co-location groups.
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto &group : dag_.stateful_groups) {
        const int head = *group.begin();
        for (int m : group) parent[find(m)] = find(head);
    }
    std::map<int, std::vector<int>> group_members;  // root -> members (only multi-member roots)
    for (int i = 0; i < n; ++i) group_members[find(i)].push_back(i);

    // Externs owned by each group root.
    std::map<int, std::set<std::string>> group_externs;
    for (const auto &[ename, users] : dag_.extern_users) {
        if (users.empty()) continue;
        group_externs[find(*users.begin())].insert(ename);
    }

    std::vector<int> order_pos(n);
    for (int i = 0; i < n; ++i) order_pos[order[i]] = i;

    std::set<std::string> charged_externs;
    std::vector<bool> placed(n, false);

    for (int oi = 0; oi < n; ++oi) {
        const int ti = order[oi];
        if (placed[ti]) continue;
        const int root = find(ti);
        const auto &members = group_members.at(root);

        if (members.size() > 1) {
            // Place when the last member in order comes up, so that every
            // member's predecessors are already placed.
            int last_pos = 0;
            for (int m : members) last_pos = std::max(last_pos, order_pos[m]);
            if (oi < last_pos) continue;
            std::vector<int> in_order = members;
            std::sort(in_order.begin(), in_order.end(),
                      [&](int a, int b) { return order_pos[a] < order_pos[b]; });
            std::vector<std::string> enames(group_externs[root].begin(),
                                            group_externs[root].end());
            for (auto &[m, placement] : place_group(in_order, enames)) {
                mapping.placements[m] = std::move(placement);
                placed[m] = true;
            }
            for (const auto &e : enames) charged_externs.insert(e);
            continue;
        }

        PendingCharge charge;
        std::vector<std::string> fresh;
        for (const auto &e : sizings_[ti].externs)
            if (!charged_externs.count(e)) fresh.push_back(e);
        charge.stateful_blocks = stateful_blocks_for(fresh);
        mapping.placements[ti] = place_single(ti, charge);
        for (const auto &e : fresh) charged_externs.insert(e);
        placed[ti] = true;
    }

    for (const auto &placement : mapping.placements) {
        for (const auto &share : placement.shares) {
            mapping.per_stage[share.stage] += share.footprint;
            mapping.occupied_stages.insert(share.stage);
        }
    }
    mapping.stages_used = static_cast<int>(mapping.occupied_stages.size());
    return mapping;
}

}  // namespace

TdgMapping place_tables(const StrictDag &dag, const LevelAssignment &levels,
                        const HardwareSpec &spec, const std::map<FieldRef, HeaderField> &fields,
                        const std::map<std::string, ExternObject> &externs,
                        const MapperOptions &opts, PipelineBudget *budget) {
    // Validate the packing unit up front so rejection names the table even
    // when placement would fail later for other reasons.
    const int p_f = opts.packing_factor > 0 ? opts.packing_factor : spec.packing_factor;
    ActionModeSpec mode = opts.action_mode;
    for (const auto &t : dag.tables) {
        auto it = opts.per_table_action_mode.find(t.name);
        sram_blocks_needed(t, spec.stage, p_f,
                           it != opts.per_table_action_mode.end() ? it->second : mode, fields,
                           externs, opts.match_pointer_overhead_bits);
    }

    PipelineBudget local(spec);
    PipelineBudget &b = budget ? *budget : local;
    Placer placer(dag, levels, spec, fields, externs, opts, b);
    return placer.run();
}

long long compute_latency(const TdgMapping &m, const StrictDag &dag, const LatencyCosts &costs) {
    if (m.occupied_stages.empty()) return 0;
    std::vector<int> stages(m.occupied_stages.begin(), m.occupied_stages.end());
    long long latency = costs.base;

    std::vector<std::pair<int, int>> spans(dag.tables.size(), {-1, -1});
    for (size_t i = 0; i < m.placements.size(); ++i)
        if (!m.placements[i].shares.empty())
            spans[i] = {m.placements[i].first_stage, m.placements[i].last_stage};

    for (size_t i = 0; i + 1 < stages.size(); ++i) {
        const int left = stages[i];
        const int right = stages[i + 1];
        DependencyKind kind = DependencyKind::None;
        for (const auto &e : dag.edges) {
            if (spans[e.from].first < 0 || spans[e.to].first < 0) continue;
            if (spans[e.from].second <= left && spans[e.to].first >= right)
                if (stricter(e.kind, kind)) kind = e.kind;
        }
        switch (kind) {
            case DependencyKind::Match: latency += costs.match; break;
            case DependencyKind::Action: latency += costs.action; break;
            default: latency += costs.other; break;
        }
    }
    return latency;
}

UtilizationSummary summarize(const TdgMapping &m) {
    UtilizationSummary s;
    s.stages_used = m.stages_used;
    s.latency_cycles = m.latency_cycles;
    for (int stage : m.occupied_stages) {
        StageUtilizationRow row;
        row.stage = stage;
        row.footprint = m.per_stage[stage];
        for (const auto &p : m.placements)
            for (const auto &share : p.shares)
                if (share.stage == stage) {
                    row.tables.push_back(p.table);
                    break;
                }
        s.totals += row.footprint;
        s.rows.push_back(std::move(row));
    }
    return s;
}

}  // namespace rmtmap
