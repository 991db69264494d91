// Copyright (c) rmtmap contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rmtmap/header_map.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rmtmap {

HeaderMapping map_headers(const std::vector<HeaderField> &fields, const PhvSpec &phv) {
    if (fields.empty()) throw InputError("header mapping: no fields to map");

    // Classes sorted by descending width; remaining inventory per class.
    std::vector<PhvContainerClass> classes = phv.container_classes;
    std::sort(classes.begin(), classes.end(),
              [](const auto &a, const auto &b) { return a.width_bits > b.width_bits; });
    std::vector<int> remaining(classes.size());
    for (size_t i = 0; i < classes.size(); ++i) remaining[i] = classes[i].count;

    // Descending field width, ties by declaration order.
    std::vector<size_t> order(fields.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return fields[a].width_bits > fields[b].width_bits;
    });

    HeaderMapping mapping;
    for (size_t idx : order) {
        const HeaderField &f = fields[idx];
        FieldAssignment assign;
        assign.field = f.ref();
        assign.field_bits = f.width_bits;

        // Greedy cover: largest class <= rest with stock, else smallest
        // class >= rest. Computed against a scratch copy of the inventory.
        std::map<int, int, std::greater<int>> greedy;  // width -> count
        int greedy_bits = -1;
        {
            std::vector<int> stock = remaining;
            int rest = f.width_bits;
            int bits = 0;
            bool ok = true;
            while (rest > 0) {
                int pick = -1;
                for (size_t c = 0; c < classes.size(); ++c) {
                    if (stock[c] > 0 && classes[c].width_bits <= rest) {
                        pick = static_cast<int>(c);
                        break;
                    }
                }
                if (pick < 0) {
                    for (size_t c = classes.size(); c-- > 0;) {
                        if (stock[c] > 0 && classes[c].width_bits >= rest) {
                            pick = static_cast<int>(c);
                            break;
                        }
                    }
                }
                if (pick < 0) {
                    ok = false;
                    break;
                }
                stock[pick]--;
                greedy[classes[pick].width_bits]++;
                bits += classes[pick].width_bits;
                rest -= classes[pick].width_bits;
            }
            if (ok) greedy_bits = bits;
        }
        // The one-container alternative: the smallest class covering the
        // whole field. Preferred whenever it allocates no more bits than
        // the greedy cover, so narrow leftovers do not starve later fields
        // of their small containers.
        int single = -1;
        for (size_t c = classes.size(); c-- > 0;) {
            if (remaining[c] > 0 && classes[c].width_bits >= f.width_bits) {
                single = static_cast<int>(c);
                break;
            }
        }

        const bool use_single =
            single >= 0 && (greedy_bits < 0 || classes[single].width_bits <= greedy_bits);
        if (use_single) {
            remaining[single]--;
            assign.containers.push_back({classes[single].width_bits, 1});
        } else if (greedy_bits >= 0) {
            for (const auto &[w, n] : greedy) {
                for (size_t c = 0; c < classes.size(); ++c)
                    if (classes[c].width_bits == w) remaining[c] -= n;
                assign.containers.push_back({w, n});
            }
        } else {
            throw RejectionError("phv", "containers", f.ref(),
                                 "PHV capacity exceeded: no container left for field '" +
                                     f.ref() + "' (" + std::to_string(f.width_bits) + " bits)");
        }
        mapping.used_bits += f.width_bits;
        mapping.allocated_bits += assign.allocated_bits();
        mapping.assignments.push_back(std::move(assign));
    }
    return mapping;
}

double waste_percent(const HeaderMapping &m) {
    if (m.allocated_bits == 0) return 0.0;
    return 100.0 * (m.allocated_bits - m.used_bits) / m.allocated_bits;
}

namespace {

// Enumerates per-field container multisets recursively, minimizing the
// total allocation over all fields.
struct BruteForce {
    const std::vector<const HeaderField *> &fields;
    const std::vector<PhvContainerClass> &classes;
    std::vector<int> stock;
    int best_total = -1;

    void solve(size_t fidx, int total) {
        if (best_total >= 0 && total >= best_total) return;
        if (fidx == fields.size()) {
            best_total = total;
            return;
        }
        const int want = fields[fidx]->width_bits;
        enumerate_covers(fidx, 0, want, total, 0);
    }

    void enumerate_covers(size_t fidx, size_t cls, int rest, int total, int taken_bits) {
        if (rest <= 0) {
            solve(fidx + 1, total + taken_bits);
            return;
        }
        if (cls >= classes.size()) return;
        const int w = classes[cls].width_bits;
        for (int take = 0; take <= stock[cls]; ++take) {
            stock[cls] -= take;
            enumerate_covers(fidx, cls + 1, rest - take * w, total, taken_bits + take * w);
            stock[cls] += take;
        }
    }
};

}  // namespace

std::optional<int> brute_force_header_map(const std::vector<HeaderField> &fields,
                                          const PhvSpec &phv, int max_fields,
                                          int max_containers) {
    int total_containers = 0;
    for (const auto &c : phv.container_classes) total_containers += c.count;
    if (static_cast<int>(fields.size()) > max_fields || total_containers > max_containers)
        throw std::invalid_argument("brute_force_header_map: instance exceeds oracle bounds");

    std::vector<PhvContainerClass> classes = phv.container_classes;
    std::sort(classes.begin(), classes.end(),
              [](const auto &a, const auto &b) { return a.width_bits > b.width_bits; });

    std::vector<const HeaderField *> refs;
    refs.reserve(fields.size());
    for (const auto &f : fields) refs.push_back(&f);

    BruteForce bf{refs, classes, {}, -1};
    bf.stock.resize(classes.size());
    for (size_t i = 0; i < classes.size(); ++i) bf.stock[i] = classes[i].count;
    bf.solve(0, 0);
    if (bf.best_total < 0) return std::nullopt;
    return bf.best_total;
}

}  // namespace rmtmap
