// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Regenerates the bundled fixtures: the benchmark hardware profile and four
// synthetic IR programs (QoS-style stateful sharing, simple and complex
// L2/L3 forwarding, computation-heavy anonymizer). Each program is verified
// against its intended structure before being written.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#include "rmtmap/hsl.hpp"
#include "rmtmap/ir.hpp"
#include "rmtmap/parser_map.hpp"
#include "rmtmap/report.hpp"
#include "synthetic_ir.hpp"

namespace {

using synth::IrBuilder;
using json = nlohmann::ordered_json;

struct Expect {
    int fields = 0;
    int field_bits = 0;
    int parse_states = 0;
    int parse_edges = 0;
    int tdg_nodes = 0;
    int tdg_edges = 0;
};

int fail_count = 0;

void check(bool ok, const std::string &what) {
    if (!ok) {
        std::cerr << "MISMATCH: " << what << "\n";
        fail_count++;
    }
}

// Meta filler so the program hits the intended total field count/bitwidth.
// Widths: counts of 8/16/32-bit fields, appended after the named fields.
void add_meta_filler(std::vector<std::pair<std::string, int>> &fields, int n8, int n16, int n32) {
    int idx = 0;
    for (int i = 0; i < n8; ++i) fields.push_back({"fill8_" + std::to_string(idx++), 8});
    for (int i = 0; i < n16; ++i) fields.push_back({"fill16_" + std::to_string(idx++), 16});
    for (int i = 0; i < n32; ++i) fields.push_back({"fill32_" + std::to_string(idx++), 32});
}

void add_eth(IrBuilder &b) {
    b.header("eth", false, {{"dst", 48}, {"src", 48}, {"ethType", 16}});
}
void add_vlan(IrBuilder &b) {
    b.header("vlan", false, {{"pcp", 3}, {"cfi", 1}, {"vid", 12}, {"ethType", 16}});
}
void add_ipv4(IrBuilder &b, const std::string &name = "ipv4") {
    b.header(name, false,
             {{"version", 4},
              {"ihl", 4},
              {"dscp", 6},
              {"ecn", 2},
              {"totalLen", 16},
              {"id", 16},
              {"flags", 3},
              {"fragOffset", 13},
              {"ttl", 8},
              {"proto", 8},
              {"csum", 16},
              {"src", 32},
              {"dst", 32}});
}
void add_ipv6(IrBuilder &b) {
    b.header("ipv6", false,
             {{"version", 4},
              {"trafficClass", 8},
              {"flowLabel", 20},
              {"payloadLen", 16},
              {"nextHdr", 8},
              {"hopLimit", 8},
              {"src", 128},
              {"dst", 128}});
}
void add_tcp(IrBuilder &b) {
    b.header("tcp", false,
             {{"sport", 16},
              {"dport", 16},
              {"seq", 32},
              {"ack", 32},
              {"dataOffset", 4},
              {"res", 4},
              {"flags", 8},
              {"window", 16},
              {"csum", 16},
              {"urgent", 16}});
}
void add_udp(IrBuilder &b) {
    b.header("udp", false, {{"sport", 16}, {"dport", 16}, {"len", 16}, {"csum", 16}});
}
void add_arp(IrBuilder &b) {
    b.header("arp", false,
             {{"htype", 16},
              {"ptype", 16},
              {"hlen", 8},
              {"plen", 8},
              {"op", 16},
              {"sha", 48},
              {"spa", 32},
              {"tha", 48},
              {"tpa", 32}});
}
void add_icmp(IrBuilder &b, const std::string &name = "icmp") {
    b.header(name, false, {{"type", 8}, {"code", 8}, {"csum", 16}, {"rest", 32}});
}
void add_vxlan(IrBuilder &b) {
    b.header("vxlan", false, {{"flags", 8}, {"rsvd", 24}, {"vni", 24}, {"rsvd2", 8}});
}

// assign(dst <- const): marks dst written, reads nothing.
json write_const(const std::string &dst) {
    return IrBuilder::primitive("assign", {IrBuilder::field(dst), IrBuilder::const_hex("0x01")});
}
// assign(dst <- src): dst written, src read.
json write_read(const std::string &dst, const std::string &src) {
    return IrBuilder::primitive("assign", {IrBuilder::field(dst), IrBuilder::field(src)});
}

// ---------------------------------------------------------------------------
// QoS modifier: stateful memory shared by tables on parallel TDG paths.
// ---------------------------------------------------------------------------

std::string build_qos() {
    IrBuilder b("qos_modifier");
    add_eth(b);
    add_ipv4(b);
    add_ipv6(b);
    add_tcp(b);
    add_udp(b);

    std::vector<std::pair<std::string, int>> meta{
        {"tos_v4", 16}, {"tos_v6", 16}, {"ttl_dec", 16}, {"mark", 16},
        {"flow_hash", 16}, {"qval_v4", 16}, {"qval_v6", 16}};
    // 28 fields, 472 bits in total: 1x8 + 25x16 + 2x32.
    add_meta_filler(meta, 1, 18, 2);
    b.header("meta", true, meta);

    // Parse graph: 5 states, 8 edges.
    b.parser_state("start", {"eth"}, {"eth.ethType"});
    b.parser_state("p_ipv4", {"ipv4"}, {"ipv4.proto"});
    b.parser_state("p_ipv6", {"ipv6"}, {"ipv6.nextHdr"});
    b.parser_state("p_tcp", {"tcp"});
    b.parser_state("p_udp", {"udp"});
    b.transition("start", "0x0800", "p_ipv4");
    b.transition("start", "0x86dd", "p_ipv6");
    b.transition("p_ipv4", "0x06", "p_tcp");
    b.transition("p_ipv4", "0x11", "p_udp");
    b.transition("p_ipv6", "0x06", "p_tcp");
    b.transition("p_ipv6", "0x11", "p_udp");
    b.transition("p_tcp", "", "");
    b.transition("p_udp", "", "");

    b.register_array("qos_state", 1024, 32);
    b.counter_array("flow_count", 4096);

    // 16 tables, 20 reduced TDG edges: a 16-edge control skeleton with two
    // parallel paths plus four long-range data dependencies.
    auto tbl = [&](const std::string &name,
                   std::vector<std::pair<std::string, std::string>> key, long long size,
                   const std::vector<std::string> &actions,
                   std::vector<std::pair<std::string, std::string>> next,
                   const std::string &base_next) {
        IrBuilder::TableSpec spec;
        spec.name = name;
        spec.key = std::move(key);
        spec.max_size = size;
        spec.actions = actions;
        spec.next = std::move(next);
        spec.base_default_next = base_next;
        b.table("ingress", spec);
    };

    b.action("fwd_l2", {9}, {write_const("meta.fill16_1")});
    tbl("l2_fwd", {{"eth.dst", "exact"}}, 4096, {"fwd_l2"}, {{"fwd_l2", "vrf_select"}},
        "vrf_select");

    b.action("to_v4", {}, {write_const("meta.fill16_2")});
    b.action("to_v6", {}, {write_const("meta.fill16_3")});
    tbl("vrf_select", {{"eth.ethType", "ternary"}}, 64, {"to_v4", "to_v6"},
        {{"to_v4", "qos_class_v4"}, {"to_v6", "qos_class_v6"}}, "");

    // ipv4 path
    b.action("set_tos_v4", {6}, {write_const("meta.tos_v4")});
    tbl("qos_class_v4", {{"ipv4.dscp", "ternary"}, {"ipv4.proto", "ternary"}}, 1024,
        {"set_tos_v4"}, {{"set_tos_v4", "ttl_check"}}, "ttl_check");

    b.action("ttl_note", {}, {write_const("meta.fill16_4")});
    tbl("ttl_check", {{"meta.ttl_dec", "exact"}}, 256, {"ttl_note"}, {{"ttl_note", "police_v4"}},
        "police_v4");

    b.action("set_mark", {8}, {write_const("meta.mark")});
    tbl("police_v4", {{"ipv4.src", "exact"}}, 8192, {"set_mark"},
        {{"set_mark", "qos_update_v4"}}, "qos_update_v4");

    b.action("bump_q_v4", {},
             {IrBuilder::primitive("register_read",
                                   {IrBuilder::field("meta.qval_v4"),
                                    IrBuilder::register_ref("qos_state"),
                                    IrBuilder::field("meta.flow_hash")}),
              IrBuilder::primitive("register_write",
                                   {IrBuilder::register_ref("qos_state"),
                                    IrBuilder::field("meta.flow_hash"),
                                    IrBuilder::field("meta.qval_v4")})});
    tbl("qos_update_v4", {{"ipv4.dst", "exact"}}, 1024, {"bump_q_v4"}, {{"bump_q_v4", "remark"}},
        "remark");

    // ipv6 path
    b.action("set_tos_v6", {6}, {write_const("meta.tos_v6")});
    tbl("qos_class_v6", {{"ipv6.trafficClass", "ternary"}}, 1024, {"set_tos_v6"},
        {{"set_tos_v6", "hop_check"}}, "hop_check");

    b.action("hop_note", {}, {write_const("meta.fill16_5")});
    tbl("hop_check", {{"ipv6.hopLimit", "exact"}}, 256, {"hop_note"}, {{"hop_note", "police_v6"}},
        "police_v6");

    b.action("police6", {8}, {write_const("meta.fill16_6")});
    tbl("police_v6", {{"ipv6.src", "exact"}}, 4096, {"police6"}, {{"police6", "qos_update_v6"}},
        "qos_update_v6");

    b.action("bump_q_v6", {},
             {IrBuilder::primitive("register_read",
                                   {IrBuilder::field("meta.qval_v6"),
                                    IrBuilder::register_ref("qos_state"),
                                    IrBuilder::field("meta.flow_hash")}),
              IrBuilder::primitive("register_write",
                                   {IrBuilder::register_ref("qos_state"),
                                    IrBuilder::field("meta.flow_hash"),
                                    IrBuilder::field("meta.qval_v6")})});
    tbl("qos_update_v6", {{"ipv6.dst", "exact"}}, 1024, {"bump_q_v6"}, {{"bump_q_v6", "remark"}},
        "remark");

    // joined tail
    b.action("apply_remark", {6}, {write_read("meta.fill16_7", "meta.tos_v6")});
    tbl("remark", {{"meta.tos_v4", "exact"}}, 512, {"apply_remark"},
        {{"apply_remark", "ttl_update"}}, "ttl_update");

    b.action("dec_ttl", {}, {write_const("meta.ttl_dec")});
    tbl("ttl_update", {{"ipv4.ttl", "exact"}}, 256, {"dec_ttl"}, {{"dec_ttl", "qos_queue"}},
        "qos_queue");

    b.action("set_queue", {5}, {write_const("meta.fill16_8")});
    tbl("qos_queue", {{"eth.dst", "exact"}}, 1024, {"set_queue"}, {{"set_queue", "ecn_mark"}},
        "ecn_mark");

    b.action("mark_ecn", {}, {write_const("meta.fill16_9")});
    tbl("ecn_mark", {{"ipv4.ecn", "exact"}}, 64, {"mark_ecn"}, {{"mark_ecn", "egress_acl"}},
        "egress_acl");

    b.action("acl_permit", {}, {write_const("meta.fill16_10")});
    tbl("egress_acl", {{"meta.mark", "ternary"}, {"ipv4.dst", "ternary"}}, 2048, {"acl_permit"},
        {{"acl_permit", "flow_stats"}}, "flow_stats");

    b.action("count_flow", {},
             {IrBuilder::primitive("count", {{{"type", "counter_array"}, {"value", "flow_count"}},
                                             IrBuilder::field("meta.flow_hash")})});
    tbl("flow_stats", {{"eth.src", "exact"}}, 4096, {"count_flow"}, {{"count_flow", ""}}, "");

    b.init_table("ingress", "l2_fwd");
    b.init_table("egress", "");
    return b.str();
}

// ---------------------------------------------------------------------------
// Simple L2/L3 forwarding: all four dependency kinds.
// ---------------------------------------------------------------------------

std::string build_l2l3_simple() {
    IrBuilder b("l2l3_simple");
    add_eth(b);
    add_vlan(b);
    add_arp(b);
    add_ipv4(b);
    add_tcp(b);
    add_udp(b);
    add_ipv6(b);
    add_icmp(b, "icmp6");
    add_vxlan(b);
    b.header("inner_eth", false, {{"dst", 48}, {"src", 48}, {"ethType", 16}});
    add_ipv4(b, "inner_ipv4");

    // Dependency fields: m* feed later matches, a* later action writes,
    // r* are matched early and written late.
    std::vector<std::pair<std::string, int>> meta;
    for (int i = 0; i < 5; ++i) meta.push_back({"m" + std::to_string(i), 16});
    for (int i = 0; i < 3; ++i) meta.push_back({"a" + std::to_string(i), 16});
    for (int i = 0; i < 6; ++i) meta.push_back({"r" + std::to_string(i), 32});
    // 51 fields, 1440 bits in total: 12x16 + 39x32.
    add_meta_filler(meta, 0, 4, 33);
    b.header("meta", true, meta);

    // Parse graph: 11 states, 31 edges.
    b.parser_state("start", {"eth"}, {"eth.ethType"});
    b.parser_state("p_vlan", {"vlan"}, {"vlan.ethType"});
    b.parser_state("p_arp", {"arp"}, {"arp.op"});
    b.parser_state("p_ipv4", {"ipv4"}, {"ipv4.proto"});
    b.parser_state("p_tcp", {"tcp"});
    b.parser_state("p_udp", {"udp"}, {"udp.dport"});
    b.parser_state("p_ipv6", {"ipv6"}, {"ipv6.nextHdr"});
    b.parser_state("p_icmp6", {"icmp6"});
    b.parser_state("p_vxlan", {"vxlan"});
    b.parser_state("p_inner_eth", {"inner_eth"}, {"inner_eth.ethType"});
    b.parser_state("p_inner_ipv4", {"inner_ipv4"});
    b.transition("start", "0x8100", "p_vlan");
    b.transition("start", "0x0800", "p_ipv4");
    b.transition("start", "0x86dd", "p_ipv6");
    b.transition("start", "0x0806", "p_arp");
    b.transition("start", "", "");
    b.transition("p_vlan", "0x0800", "p_ipv4");
    b.transition("p_vlan", "0x86dd", "p_ipv6");
    b.transition("p_vlan", "", "");
    b.transition("p_arp", "0x0001", "");
    b.transition("p_arp", "0x0002", "");
    b.transition("p_arp", "", "");
    b.transition("p_ipv4", "0x06", "p_tcp");
    b.transition("p_ipv4", "0x11", "p_udp");
    b.transition("p_ipv4", "0x01", "");
    b.transition("p_ipv4", "0x02", "");
    b.transition("p_ipv4", "0x2f", "");
    b.transition("p_ipv4", "", "");
    b.transition("p_tcp", "", "");
    b.transition("p_udp", "0x12b5", "p_vxlan");
    b.transition("p_udp", "0x0035", "");
    b.transition("p_udp", "", "");
    b.transition("p_vxlan", "", "p_inner_eth");
    b.transition("p_inner_eth", "0x0800", "p_inner_ipv4");
    b.transition("p_inner_eth", "0x86dd", "");
    b.transition("p_inner_eth", "", "");
    b.transition("p_inner_ipv4", "", "");
    b.transition("p_ipv6", "0x3a", "p_icmp6");
    b.transition("p_ipv6", "0x06", "");
    b.transition("p_ipv6", "0x11", "");
    b.transition("p_ipv6", "", "");
    b.transition("p_icmp6", "", "");

    // TDG: 24 tables, a 24-edge control skeleton (fork at t1, join at t16)
    // plus 14 data dependencies covering all four kinds.
    struct T {
        std::string name;
        std::vector<std::pair<std::string, std::string>> key;
        long long size;
        std::vector<json> prims;    // action primitives
        std::vector<int> args;
        std::vector<std::string> next_names;  // successor tables ("" = exit)
    };
    std::vector<T> ts(24);
    auto fill = [&](int i) { return "meta.fill32_" + std::to_string(4 + i); };
    for (int i = 0; i < 24; ++i) {
        ts[i].name = "t" + std::to_string(i);
        ts[i].size = 1024;
        ts[i].args = {};
        ts[i].prims = {write_const(fill(i))};
    }
    // control skeleton
    ts[0].next_names = {"t1"};
    ts[1].next_names = {"t2", "t10"};
    for (int i = 2; i <= 8; ++i) ts[i].next_names = {"t" + std::to_string(i + 1)};
    ts[9].next_names = {"t16"};
    for (int i = 10; i <= 14; ++i) ts[i].next_names = {"t" + std::to_string(i + 1)};
    ts[15].next_names = {"t16"};
    for (int i = 16; i <= 22; ++i) ts[i].next_names = {"t" + std::to_string(i + 1)};
    ts[23].next_names = {""};

    // realistic keys and sizes
    ts[0].key = {{"eth.dst", "exact"}};
    ts[0].size = 131072;  // large L2 table, spans stages
    ts[0].args = {9};
    ts[1].key = {{"eth.ethType", "ternary"}};
    ts[1].size = 64;
    ts[2].key = {{"ipv4.dst", "lpm"}};
    ts[2].size = 32768;
    ts[3].key = {{"ipv4.ttl", "exact"}};
    ts[4].key = {{"ipv4.dst", "exact"}};
    ts[4].size = 16384;
    ts[4].args = {9};
    ts[5].key = {{"ipv4.src", "ternary"}};
    ts[6].key = {{"ipv4.dscp", "ternary"}};
    ts[7].key = {{"tcp.dport", "exact"}};
    ts[8].key = {{"udp.dport", "exact"}};
    ts[9].key = {{"ipv4.proto", "exact"}};
    ts[10].key = {{"ipv6.dst", "lpm"}};
    ts[10].size = 8192;
    ts[11].key = {{"ipv6.hopLimit", "exact"}};
    ts[12].key = {{"ipv6.src", "ternary"}};
    ts[13].key = {{"ipv6.trafficClass", "exact"}};
    ts[14].key = {{"ipv6.nextHdr", "exact"}};
    ts[15].key = {{"icmp6.type", "exact"}};
    ts[16].key = {{"eth.src", "ternary"},     {"ipv4.src", "ternary"},
                  {"ipv4.dst", "ternary"},    {"ipv4.proto", "ternary"},
                  {"tcp.sport", "ternary"},   {"tcp.dport", "ternary"}};
    ts[16].size = 8192;  // wide ACL
    ts[17].key = {{"vlan.vid", "exact"}};
    ts[18].key = {{"inner_eth.dst", "exact"}};
    ts[19].key = {{"inner_ipv4.dst", "lpm"}};
    ts[19].size = 4096;
    ts[20].key = {{"vxlan.vni", "exact"}};
    ts[21].key = {{"meta.m4", "ternary"}, {"ipv6.flowLabel", "ternary"}};
    ts[21].size = 4096;
    ts[22].key = {{"tcp.flags", "ternary"}};
    ts[23].key = {{"eth.src", "exact"}};
    ts[23].args = {9};

    // MATCH: writer's action feeds a later table's key.
    auto match_dep = [&](int from, int to, int k) {
        ts[from].prims.push_back(write_const("meta.m" + std::to_string(k)));
        ts[to].key.push_back({"meta.m" + std::to_string(k), "exact"});
    };
    match_dep(2, 4, 0);
    match_dep(3, 16, 1);
    match_dep(10, 16, 2);
    match_dep(4, 9, 3);
    match_dep(18, 21, 4);
    // ACTION: both tables write the same field.
    auto action_dep = [&](int from, int to, int k) {
        ts[from].prims.push_back(write_const("meta.a" + std::to_string(k)));
        ts[to].prims.push_back(write_const("meta.a" + std::to_string(k)));
    };
    action_dep(5, 16, 0);
    action_dep(12, 14, 1);
    action_dep(6, 8, 2);
    // REVERSE-MATCH: early table matches what a later table writes.
    auto reverse_dep = [&](int from, int to, int k) {
        ts[from].key.push_back({"meta.r" + std::to_string(k), "exact"});
        ts[to].prims.push_back(write_const("meta.r" + std::to_string(k)));
    };
    reverse_dep(7, 17, 0);
    reverse_dep(11, 13, 1);
    reverse_dep(13, 20, 2);
    reverse_dep(2, 21, 3);
    reverse_dep(17, 22, 4);
    reverse_dep(19, 23, 5);

    for (int i = 0; i < 24; ++i) {
        const std::string aname = "act" + std::to_string(i);
        b.action(aname, ts[i].args, ts[i].prims);
        IrBuilder::TableSpec spec;
        spec.name = ts[i].name;
        spec.key = ts[i].key;
        spec.max_size = ts[i].size;
        spec.actions = {aname};
        if (ts[i].next_names.size() == 1) {
            spec.next = {{aname, ts[i].next_names[0]}};
            spec.base_default_next = ts[i].next_names[0];
        } else {
            // fork: route per hit/miss
            spec.next = {{"__HIT__", ts[i].next_names[0]}, {"__MISS__", ts[i].next_names[1]}};
        }
        b.table("ingress", spec);
    }
    b.init_table("ingress", "t0");
    b.init_table("egress", "");
    return b.str();
}

// ---------------------------------------------------------------------------
// Complex L2/L3: heavy TCAM/SRAM demand, deep strict chains.
// ---------------------------------------------------------------------------

std::string build_l2l3_complex() {
    IrBuilder b("l2l3_complex");
    add_eth(b);
    add_vlan(b);
    add_ipv4(b);
    add_ipv6(b);
    add_tcp(b);
    add_udp(b);
    add_icmp(b);

    const int kTables = 60;
    const int kEdges = 138;
    const int kSpine = kTables - 1;
    const int kRev = kEdges - kSpine;  // 79 reverse-match pairs

    // Reverse-match deps: field dK written by table 50+K, matched by the
    // eight tables 41+K..48+K (gap >= 2 from the writer).
    struct RevPair {
        int matcher;
        int writer;
        int field;
    };
    std::vector<RevPair> revs;
    {
        int produced = 0;
        for (int k = 0; k < 10 && produced < kRev; ++k) {
            const int writer = 50 + k;
            for (int j = 0; j < 8 && produced < kRev; ++j) {
                revs.push_back({48 + k - j, writer, k});
                produced++;
            }
        }
    }
    // Match upgrades on every fourth spine hop keep strict depth bounded.
    std::vector<int> upgrades;
    for (int p = 3; p + 1 < kTables && upgrades.size() < 14; p += 4) upgrades.push_back(p);

    std::vector<std::pair<std::string, int>> meta;
    for (int k = 0; k < 10; ++k) meta.push_back({"d" + std::to_string(k), 16});
    for (size_t j = 0; j < upgrades.size(); ++j)
        meta.push_back({"up" + std::to_string(j), j < 12 ? 16 : 8});
    // 48 fields, 1064 bits in total: 5x8 + 22x16 + 21x32.
    add_meta_filler(meta, 3, 0, 21);
    b.header("meta", true, meta);

    // Parse graph: 7 states, 14 edges.
    b.parser_state("start", {"eth"}, {"eth.ethType"});
    b.parser_state("p_vlan", {"vlan"}, {"vlan.ethType"});
    b.parser_state("p_ipv4", {"ipv4"}, {"ipv4.proto"});
    b.parser_state("p_ipv6", {"ipv6"}, {"ipv6.nextHdr"});
    b.parser_state("p_tcp", {"tcp"});
    b.parser_state("p_udp", {"udp"});
    b.parser_state("p_icmp", {"icmp"});
    b.transition("start", "0x8100", "p_vlan");
    b.transition("start", "0x0800", "p_ipv4");
    b.transition("start", "0x86dd", "p_ipv6");
    b.transition("p_vlan", "0x0800", "p_ipv4");
    b.transition("p_vlan", "0x86dd", "p_ipv6");
    b.transition("p_ipv4", "0x06", "p_tcp");
    b.transition("p_ipv4", "0x11", "p_udp");
    b.transition("p_ipv4", "0x01", "p_icmp");
    b.transition("p_ipv4", "", "");
    b.transition("p_ipv6", "0x06", "p_tcp");
    b.transition("p_ipv6", "0x11", "p_udp");
    b.transition("p_tcp", "", "");
    b.transition("p_udp", "", "");
    b.transition("p_icmp", "", "");

    // Key/size profiles cycling over the spine; a few indices carry the
    // really big tables.
    for (int i = 0; i < kTables; ++i) {
        std::vector<std::pair<std::string, std::string>> key;
        long long size = 2048;
        std::vector<int> args;
        std::vector<json> prims;

        switch (i) {
            case 2:
                key = {{"ipv6.dst", "ternary"}, {"ipv6.src", "ternary"}};
                size = 16384;
                break;
            case 5:
                key = {{"ipv4.dst", "lpm"}};
                size = 65536;
                break;
            case 8:
                key = {{"ipv4.src", "ternary"}, {"ipv4.dst", "ternary"},
                       {"ipv4.proto", "ternary"}, {"tcp.sport", "ternary"},
                       {"tcp.dport", "ternary"}};
                size = 16384;
                break;
            case 12:
                key = {{"eth.dst", "exact"}};
                size = 262144;
                args = {9, 48};
                break;
            case 20:
                key = {{"ipv4.dst", "exact"}};
                size = 200000;
                args = {9};
                break;
            case 28:
                key = {{"ipv6.dst", "exact"}};
                size = 65536;
                args = {9};
                break;
            case 36:
                key = {{"eth.src", "exact"}, {"vlan.vid", "exact"}};
                size = 131072;
                args = {9};
                break;
            case 44:
                key = {{"ipv6.flowLabel", "ternary"}};
                size = 32768;
                break;
            default: {
                static const char *kKeys[] = {"ipv4.ttl",  "tcp.dport", "udp.sport",
                                              "ipv4.dscp", "eth.src",   "ipv6.hopLimit"};
                const bool tern = i % 7 == 3;
                key = {{kKeys[i % 6], tern ? "ternary" : "exact"}};
                size = tern ? 4096 : 8192;
                break;
            }
        }
        std::set<int> matched_deps;
        std::set<int> written_deps;
        for (const auto &rp : revs) {
            if (rp.matcher == i && matched_deps.insert(rp.field).second)
                key.push_back({"meta.d" + std::to_string(rp.field), "exact"});
            if (rp.writer == i && written_deps.insert(rp.field).second)
                prims.push_back(write_const("meta.d" + std::to_string(rp.field)));
        }
        for (size_t j = 0; j < upgrades.size(); ++j) {
            if (upgrades[j] == i) prims.push_back(write_const("meta.up" + std::to_string(j)));
            if (upgrades[j] + 1 == i)
                key.push_back({"meta.up" + std::to_string(j), "exact"});
        }
        if (prims.empty() && i % 3 == 0 && i / 3 < 21)
            prims.push_back(write_const("meta.fill32_" + std::to_string(3 + i / 3)));

        const std::string aname = "act" + std::to_string(i);
        b.action(aname, args, prims);
        IrBuilder::TableSpec spec;
        spec.name = "t" + std::to_string(i);
        spec.key = key;
        spec.max_size = size;
        spec.actions = {aname};
        const std::string next = i + 1 < kTables ? "t" + std::to_string(i + 1) : "";
        spec.next = {{aname, next}};
        spec.base_default_next = next;
        b.table("ingress", spec);
    }
    b.init_table("ingress", "t0");
    b.init_table("egress", "");
    return b.str();
}

// ---------------------------------------------------------------------------
// Traffic anonymizer: computation heavy, branchy control flow, little memory.
// ---------------------------------------------------------------------------

std::string build_anonymizer() {
    IrBuilder b("traffic_anonymizer");
    add_eth(b);
    add_arp(b);
    add_ipv4(b);
    add_icmp(b);

    const int kTables = 84;

    std::vector<std::pair<std::string, int>> meta;
    for (int j = 0; j < 16; ++j) meta.push_back({"u" + std::to_string(j), 16});
    meta.push_back({"flow_hash", 16});
    meta.push_back({"salt", 16});
    meta.push_back({"rand", 16});
    meta.push_back({"anon_a", 32});
    meta.push_back({"anon_b", 32});
    meta.push_back({"anon_c", 32});
    // 29 fields, 504 bits in total: 1x8 + 25x16 + 3x32.
    add_meta_filler(meta, 1, 6, 0);
    b.header("meta", true, meta);

    // Parse graph: 4 states, 10 edges.
    b.parser_state("start", {"eth"}, {"eth.ethType"});
    b.parser_state("p_arp", {"arp"});
    b.parser_state("p_ipv4", {"ipv4"}, {"ipv4.proto"});
    b.parser_state("p_icmp", {"icmp"});
    b.transition("start", "0x0806", "p_arp");
    b.transition("start", "0x0800", "p_ipv4");
    b.transition("start", "", "");
    b.transition("p_arp", "", "");
    b.transition("p_ipv4", "0x01", "p_icmp");
    b.transition("p_ipv4", "0x06", "");
    b.transition("p_ipv4", "0x11", "");
    b.transition("p_ipv4", "0x02", "");
    b.transition("p_ipv4", "", "");
    b.transition("p_icmp", "", "");

    b.register_array("anon_state", 65536, 32);
    b.counter_array("pkt_count", 16384);

    for (int i = 0; i < kTables; ++i) {
        std::vector<std::pair<std::string, std::string>> key;
        long long size = 1;
        std::vector<int> args;
        std::vector<json> prims;

        if (i % 20 == 0) {
            key = {{"eth.src", "exact"}};
            size = 512;
            args = {9};
        } else if (i == 41 || i == 43) {
            key = {{"ipv4.src", "ternary"}};
            size = 1024;
        }
        if (i % 4 == 1) args = {16, 8};

        // Action-strength upgrades on every fifth spine hop: both sides of
        // the hop write the same scratch field.
        if (i % 5 == 4 && i + 1 < kTables && i / 5 < 16)
            prims.push_back(write_const("meta.u" + std::to_string(i / 5)));
        if (i % 5 == 0 && i > 0 && (i - 1) / 5 < 16)
            prims.push_back(write_const("meta.u" + std::to_string((i - 1) / 5)));

        if (i == 20) {
            prims.push_back(IrBuilder::primitive(
                "register_read", {IrBuilder::field("meta.anon_a"),
                                  IrBuilder::register_ref("anon_state"),
                                  IrBuilder::field("meta.flow_hash")}));
        } else if (i == 40) {
            prims.push_back(IrBuilder::primitive(
                "count", {{{"type", "counter_array"}, {"value", "pkt_count"}},
                          IrBuilder::field("meta.flow_hash")}));
        } else if (i == 60) {
            prims.push_back(IrBuilder::primitive(
                "hash", {IrBuilder::field("meta.anon_b"), IrBuilder::field("ipv4.src"),
                         IrBuilder::field("meta.salt")}));
        } else if (i == 80) {
            prims.push_back(write_read("meta.anon_c", "meta.rand"));
        }

        // Fan-out: t_i -> t_{i+1}, t_{i+2}, and t_{i+3} on every third
        // table; one extra fork from t0 to t4.
        std::vector<std::string> nexts;
        auto target = [&](int t) {
            return t < kTables ? "t" + std::to_string(t) : std::string{};
        };
        nexts.push_back(target(i + 1));
        if (i + 2 < kTables) nexts.push_back(target(i + 2));
        if (i % 3 == 0 && i + 3 < kTables) nexts.push_back(target(i + 3));
        if (i == 0 || i == 1) nexts.push_back(target(4));

        std::vector<std::string> action_names;
        IrBuilder::TableSpec spec;
        for (size_t k = 0; k < nexts.size(); ++k) {
            const std::string aname = "act" + std::to_string(i) + "_" + std::to_string(k);
            b.action(aname, args, k == 0 ? prims : std::vector<json>{});
            action_names.push_back(aname);
            spec.next.push_back({aname, nexts[k]});
        }
        spec.name = "t" + std::to_string(i);
        spec.key = key;
        spec.max_size = size;
        spec.actions = action_names;
        b.table("ingress", spec);
    }
    b.init_table("ingress", "t0");
    b.init_table("egress", "");
    return b.str();
}

// ---------------------------------------------------------------------------

void verify(const std::string &name, const std::string &doc, const Expect &want,
            bool expect_all_kinds) {
    rmtmap::Diagnostics diags;
    rmtmap::IrProgram prog = rmtmap::parse_ir(doc, &diags);

    int bits = 0;
    for (const auto &f : prog.fields) bits += f.width_bits;
    check(static_cast<int>(prog.fields.size()) == want.fields,
          name + ": fields " + std::to_string(prog.fields.size()) + " != " +
              std::to_string(want.fields));
    check(bits == want.field_bits,
          name + ": field bits " + std::to_string(bits) + " != " + std::to_string(want.field_bits));

    rmtmap::ParseGraph g = rmtmap::build_parse_graph(prog, &diags);
    check(static_cast<int>(g.nodes.size()) == want.parse_states,
          name + ": parse states " + std::to_string(g.nodes.size()) + " != " +
              std::to_string(want.parse_states));
    check(static_cast<int>(g.edges.size()) == want.parse_edges,
          name + ": parse edges " + std::to_string(g.edges.size()) + " != " +
              std::to_string(want.parse_edges));

    rmtmap::Tdg tdg = rmtmap::build_tdg(prog, "ingress", &diags);
    check(static_cast<int>(tdg.tables.size()) == want.tdg_nodes,
          name + ": tdg nodes " + std::to_string(tdg.tables.size()) + " != " +
              std::to_string(want.tdg_nodes));
    check(static_cast<int>(tdg.edges.size()) == want.tdg_edges,
          name + ": tdg edges " + std::to_string(tdg.edges.size()) + " != " +
              std::to_string(want.tdg_edges));

    if (expect_all_kinds) {
        std::set<rmtmap::DependencyKind> kinds;
        for (const auto &e : tdg.edges) kinds.insert(e.strictest());
        check(kinds.count(rmtmap::DependencyKind::Match) == 1, name + ": missing match dep");
        check(kinds.count(rmtmap::DependencyKind::Action) == 1, name + ": missing action dep");
        check(kinds.count(rmtmap::DependencyKind::ReverseMatch) == 1,
              name + ": missing reverse-match dep");
        check(kinds.count(rmtmap::DependencyKind::Successor) == 1,
              name + ": missing successor dep");
    }

    const std::string hsl = rmtmap::serialize_hsl(rmtmap::default_spec());
    rmtmap::MappingReport report = rmtmap::compile_documents(doc, hsl);
    check(report.verdict.accepted, name + ": not accepted: " + report.verdict.reason);
    std::cout << name << ": fields=" << prog.fields.size() << "/" << bits
              << " parse=" << g.nodes.size() << "s/" << g.edges.size() << "e tdg="
              << tdg.tables.size() << "n/" << tdg.edges.size() << "e";
    if (report.parser) std::cout << " entries=" << report.parser->entry_count;
    if (!report.pipelines.empty())
        std::cout << " stages=" << report.pipelines[0].stages_used
                  << " latency=" << report.pipelines[0].latency_cycles << " tcam="
                  << report.pipelines[0].summary.totals.tcam_blocks << " sram="
                  << report.pipelines[0].summary.totals.sram_total();
    std::cout << (report.verdict.accepted ? " ACCEPTED" : " REJECTED") << "\n";
}

void write_file(const std::filesystem::path &path, const std::string &content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace

int main(int argc, char **argv) {
    const std::filesystem::path root = argc > 1 ? argv[1] : "fixtures";

    const std::string qos = build_qos();
    const std::string simple = build_l2l3_simple();
    const std::string complex_doc = build_l2l3_complex();
    const std::string anony = build_anonymizer();

    verify("qos_modifier", qos, {66, 1288, 5, 8, 16, 20}, false);
    verify("l2l3_simple", simple, {126, 2912, 11, 31, 24, 38}, true);
    verify("l2l3_complex", complex_doc, {94, 1976, 7, 14, 60, 138}, false);
    verify("traffic_anonymizer", anony, {58, 1064, 4, 10, 84, 194}, false);

    if (fail_count > 0) {
        std::cerr << fail_count << " mismatches; fixtures not written\n";
        return 1;
    }

    write_file(root / "hw" / "v1model_benchmark.json",
               rmtmap::serialize_hsl(rmtmap::default_spec()));
    write_file(root / "ir" / "qos_modifier.json", qos);
    write_file(root / "ir" / "l2l3_simple.json", simple);
    write_file(root / "ir" / "l2l3_complex.json", complex_doc);
    write_file(root / "ir" / "traffic_anonymizer.json", anony);
    std::cout << "fixtures written under " << root << "\n";
    return 0;
}
