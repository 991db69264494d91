// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rmtmap/parser_map.hpp"

#include <algorithm>
#include <set>

namespace rmtmap {

namespace {

int slots_for_width(int width_bits, const ParserSpec &p) {
    return (width_bits + p.lookup_field_width - 1) / p.lookup_field_width;
}

struct GraphView {
    const ParseGraph &g;
    std::map<std::string, int> index;
    std::vector<std::set<int>> preds;
    std::vector<std::vector<int>> succs;  // real-node successors only

    explicit GraphView(const ParseGraph &graph) : g(graph) {
        for (size_t i = 0; i < g.nodes.size(); ++i)
            index[g.nodes[i].id] = static_cast<int>(i);
        preds.resize(g.nodes.size());
        succs.resize(g.nodes.size());
        for (const auto &e : g.edges) {
            if (e.to == kAcceptSink) continue;
            preds[index.at(e.to)].insert(index.at(e.from));
            succs[index.at(e.from)].push_back(index.at(e.to));
        }
    }

    // Kahn topological order, lowest declaration index first.
    std::vector<int> topo_order() const {
        std::vector<int> indeg(g.nodes.size(), 0);
        for (size_t i = 0; i < g.nodes.size(); ++i)
            indeg[i] = static_cast<int>(preds[i].size());
        std::set<int> ready;
        for (size_t i = 0; i < g.nodes.size(); ++i)
            if (indeg[i] == 0) ready.insert(static_cast<int>(i));
        std::vector<int> order;
        std::vector<int> deg = indeg;
        while (!ready.empty()) {
            int u = *ready.begin();
            ready.erase(ready.begin());
            order.push_back(u);
            for (int v : succs[u])
                if (--deg[v] == 0) ready.insert(v);
        }
        return order;
    }
};

// The lookup fields (with widths) one entry must match, given the member
// set of a candidate cluster: every select routing from the cluster head
// to the exit node, plus the exit transition's own selects.
struct MemberFields {
    std::map<std::string, std::map<FieldRef, int>> path_fields;  // node -> field -> width
};

MemberFields path_fields_within(const std::set<std::string> &members, const GraphView &view,
                                const std::vector<int> &topo) {
    MemberFields mf;
    for (const auto &m : members) mf.path_fields[m];  // default-empty
    for (int idx : topo) {
        const std::string &id = view.g.nodes[idx].id;
        if (!members.count(id)) continue;
        for (const auto &e : view.g.edges) {
            if (e.from != id || e.to == kAcceptSink || !members.count(e.to)) continue;
            auto &dst = mf.path_fields[e.to];
            for (const auto &[f, w] : mf.path_fields[id]) dst[f] = w;
            for (size_t i = 0; i < e.select_fields.size(); ++i)
                dst[e.select_fields[i]] = e.select_widths[i];
        }
    }
    return mf;
}

struct EntryShape {
    const ParseGraphEdge *edge = nullptr;
    std::map<FieldRef, int> fields;  // field -> width, routing + exit selects
    int slots = 0;
};

std::vector<EntryShape> entry_shapes(const std::set<std::string> &members, const GraphView &view,
                                     const std::vector<int> &topo, const ParserSpec &p) {
    MemberFields mf = path_fields_within(members, view, topo);
    std::vector<EntryShape> shapes;
    for (const auto &e : view.g.edges) {
        if (!members.count(e.from)) continue;
        if (e.to != kAcceptSink && members.count(e.to)) continue;  // intra-cluster
        EntryShape shape;
        shape.edge = &e;
        shape.fields = mf.path_fields.at(e.from);
        for (size_t i = 0; i < e.select_fields.size(); ++i)
            shape.fields[e.select_fields[i]] = e.select_widths[i];
        for (const auto &[f, w] : shape.fields) shape.slots += slots_for_width(w, p);
        shapes.push_back(std::move(shape));
    }
    return shapes;
}

struct Feasibility {
    bool ok = true;
    std::string reason;
    std::string resource;
};

Feasibility cluster_feasible(const std::set<std::string> &members, const GraphView &view,
                             const std::vector<int> &topo, const ParserSpec &p) {
    Feasibility f;
    if (static_cast<int>(members.size()) > p.max_headers_per_cycle) {
        f.ok = false;
        f.resource = "headers-per-cycle";
        f.reason = "more than " + std::to_string(p.max_headers_per_cycle) + " headers";
        return f;
    }
    const int budget = std::min(p.lookahead_bits, p.extraction_width_bits);
    int bits = 0;
    for (const auto &m : members) bits += view.g.find_node(m)->total_header_bits;
    if (bits > budget) {
        f.ok = false;
        f.resource = "extraction-budget";
        f.reason = std::to_string(bits) + " header bits exceed the per-cycle budget of " +
                   std::to_string(budget);
        return f;
    }
    for (const auto &shape : entry_shapes(members, view, topo, p)) {
        if (shape.slots > p.lookup_fields_per_cycle) {
            f.ok = false;
            f.resource = "lookup-fields";
            f.reason = "transition out of '" + shape.edge->from + "' needs " +
                       std::to_string(shape.slots) + " lookup slots, parser provides " +
                       std::to_string(p.lookup_fields_per_cycle);
            return f;
        }
        if (shape.slots * p.lookup_field_width > p.tcam_entry_width) {
            f.ok = false;
            f.resource = "tcam-entry-width";
            f.reason = "lookup for transition out of '" + shape.edge->from +
                       "' is wider than a parser TCAM entry";
            return f;
        }
    }
    return f;
}

}  // namespace

ClusterGraph cluster_parse_graph(const ParseGraph &g, const ParserSpec &p) {
    GraphView view(g);
    const std::vector<int> topo = view.topo_order();
    if (topo.size() != g.nodes.size())
        throw RejectionError("parser", "dag", "", "parse graph is not acyclic");

    ClusterGraph cg;
    cg.graph = g;
    std::set<std::string> clustered;

    for (int seed : topo) {
        const std::string &seed_id = g.nodes[seed].id;
        if (clustered.count(seed_id)) continue;

        std::set<std::string> members{seed_id};
        Feasibility f = cluster_feasible(members, view, topo, p);
        if (!f.ok)
            throw RejectionError("parser", f.resource, seed_id,
                                 "header '" + seed_id + "' alone exceeds parser capacity: " +
                                     f.reason);
        std::vector<std::string> order{seed_id};

        bool grew = true;
        while (grew && static_cast<int>(members.size()) < p.max_headers_per_cycle) {
            grew = false;
            for (int cand : topo) {
                const std::string &cid = g.nodes[cand].id;
                if (clustered.count(cid) || members.count(cid)) continue;
                const auto &pr = view.preds[view.index.at(cid)];
                if (pr.empty()) continue;
                bool all_in = true;
                for (int pidx : pr)
                    if (!members.count(g.nodes[pidx].id)) {
                        all_in = false;
                        break;
                    }
                if (!all_in) continue;
                std::set<std::string> grown = members;
                grown.insert(cid);
                if (!cluster_feasible(grown, view, topo, p).ok) continue;
                members = std::move(grown);
                order.push_back(cid);
                grew = true;
                break;
            }
        }

        Cluster cluster;
        cluster.members = order;
        for (const auto &m : members) {
            cluster.total_header_bits += g.find_node(m)->total_header_bits;
            cg.cluster_of[m] = static_cast<int>(cg.clusters.size());
        }
        for (const auto &shape : entry_shapes(members, view, topo, p))
            cluster.lookup_slots_used = std::max(cluster.lookup_slots_used, shape.slots);
        for (const auto &m : order) clustered.insert(m);
        cg.clusters.push_back(std::move(cluster));
    }
    return cg;
}

StateTable emit_state_table(const ClusterGraph &cg, const ParserSpec &p) {
    GraphView view(cg.graph);
    const std::vector<int> topo = view.topo_order();
    StateTable table;

    for (size_t ci = 0; ci < cg.clusters.size(); ++ci) {
        std::set<std::string> members(cg.clusters[ci].members.begin(),
                                      cg.clusters[ci].members.end());
        MemberFields mf = path_fields_within(members, view, topo);
        for (const auto &e : cg.graph.edges) {
            if (!members.count(e.from)) continue;
            if (e.to != kAcceptSink && members.count(e.to)) continue;
            StateTableEntry entry;
            entry.cluster = static_cast<int>(ci);
            entry.from_node = e.from;
            entry.to_node = e.to;
            entry.to_cluster = e.to == kAcceptSink ? -1 : cg.cluster_of.at(e.to);
            entry.value_hex = e.value_hex;
            entry.mask_hex = e.mask_hex;

            std::map<FieldRef, int> fields = mf.path_fields.at(e.from);
            std::set<FieldRef> exit_selects(e.select_fields.begin(), e.select_fields.end());
            for (size_t i = 0; i < e.select_fields.size(); ++i)
                fields[e.select_fields[i]] = e.select_widths[i];
            for (const auto &[fref, width] : fields) {
                LookupFieldUse use;
                use.field = fref;
                use.width_bits = width;
                use.slots = slots_for_width(width, p);
                use.exit_select = exit_selects.count(fref) > 0;
                entry.lookup_slots += use.slots;
                entry.lookup.push_back(std::move(use));
            }
            entry.lookup_bits_padded = entry.lookup_slots * p.lookup_field_width;
            for (const auto &m : cg.clusters[ci].members) {
                const ParseGraphNode *node = cg.graph.find_node(m);
                entry.extract_headers.insert(entry.extract_headers.end(),
                                             node->header_instances.begin(),
                                             node->header_instances.end());
            }
            table.entries.push_back(std::move(entry));
        }
    }
    return table;
}

CapacityVerdict check_capacity(const StateTable &t, const ParserSpec &p) {
    CapacityVerdict v;
    v.entry_count = t.entry_count();
    v.capacity = p.tcam_entries;
    v.utilization_percent = p.tcam_entries == 0
                                ? 0.0
                                : 100.0 * v.entry_count / static_cast<double>(p.tcam_entries);
    if (v.entry_count > p.tcam_entries) {
        v.accepted = false;
        v.reason = "state table needs " + std::to_string(v.entry_count) +
                   " entries, parser TCAM holds " + std::to_string(p.tcam_entries);
        return v;
    }
    for (const auto &e : t.entries) {
        if (e.lookup_slots > p.lookup_fields_per_cycle) {
            v.accepted = false;
            v.reason = "entry for '" + e.from_node + "' -> '" + e.to_node + "' needs " +
                       std::to_string(e.lookup_slots) + " lookup slots, parser provides " +
                       std::to_string(p.lookup_fields_per_cycle);
            return v;
        }
        if (e.lookup_bits_padded > p.tcam_entry_width) {
            v.accepted = false;
            v.reason = "entry for '" + e.from_node + "' is wider than a parser TCAM entry";
            return v;
        }
    }
    v.accepted = true;
    return v;
}

}  // namespace rmtmap
