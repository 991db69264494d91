// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Assignment of program header fields to PHV containers. Each container
// holds at most one field; a field may span several containers. Allocation
// follows the largest-field-first heuristic with greedy container choice.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmtmap/hsl.hpp"
#include "rmtmap/ir.hpp"

namespace rmtmap {

struct ContainerUse {
    int width_bits = 0;
    int count = 0;
};

struct FieldAssignment {
    FieldRef field;
    int field_bits = 0;
    std::vector<ContainerUse> containers;  // ordered by descending width

    int allocated_bits() const {
        int sum = 0;
        for (const auto &c : containers) sum += c.width_bits * c.count;
        return sum;
    }
};

struct HeaderMapping {
    std::vector<FieldAssignment> assignments;  // in placement order
    int used_bits = 0;
    int allocated_bits = 0;

    double waste_fraction() const {
        return allocated_bits == 0
                   ? 0.0
                   : static_cast<double>(allocated_bits - used_bits) / allocated_bits;
    }
};

/// Maps every field onto whole PHV containers. Fields are processed in
/// descending width order (ties by declaration order); each field greedily
/// takes the largest available class not wider than its remaining bits,
/// falling back to the smallest class that covers the remainder. Throws
/// RejectionError ("phv", "containers", field) when the inventory runs out.
HeaderMapping map_headers(const std::vector<HeaderField> &fields, const PhvSpec &phv);

/// 100 * (allocated - used) / allocated.
double waste_percent(const HeaderMapping &m);

/// Exhaustive-minimum reference allocator for small instances: at most
/// max_fields fields and max_containers total containers. Returns the
/// minimal total allocated bits, or nullopt when no assignment covers all
/// fields. Independent of map_headers; used as a test oracle.
std::optional<int> brute_force_header_map(const std::vector<HeaderField> &fields,
                                          const PhvSpec &phv, int max_fields = 6,
                                          int max_containers = 8);

}  // namespace rmtmap
