/*
 * Copyright 2026 The haargof Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "haargof/common.hpp"

namespace haargof {

// Nonincreasing positive parts; the empty partition is allowed (weight 0).
struct Partition {
    std::vector<int> parts;

    int weight() const { return std::accumulate(parts.begin(), parts.end(), 0); }
    int num_parts() const { return static_cast<int>(parts.size()); }
};

// p(n, k): number of partitions of k into at most n parts, memoized over the
// recurrence p(n, k) = p(n-1, k) + p(n, k-n).
class PartitionTable {
  public:
    PartitionTable(int n_max, int k_max) : n_max_(n_max), k_max_(k_max) {
        if (n_max < 0 || k_max < 0)
            throw Error(errc::non_positive_parameter, "PartitionTable: negative bounds");
        table_.assign(static_cast<std::size_t>(n_max + 1) * (k_max + 1), 0);
        for (int n = 0; n <= n_max; ++n) at(n, 0) = 1;
        for (int n = 1; n <= n_max; ++n) {
            for (int k = 1; k <= k_max; ++k) {
                std::uint64_t v = at(n - 1, k);
                if (k >= n) {
                    std::uint64_t w = at(n, k - n);
                    if (v > UINT64_MAX - w)
                        throw Error(errc::numerical, "PartitionTable: count overflow");
                    v += w;
                }
                at(n, k) = v;
            }
        }
    }

    std::uint64_t operator()(int n, int k) const {
        if (n < 0 || k < 0)
            throw Error(errc::non_positive_parameter, "PartitionTable: negative index");
        if (k == 0) return 1;
        if (n == 0) return 0;
        if (n > n_max_ || k > k_max_)
            throw Error(errc::non_positive_parameter, "PartitionTable: index out of range");
        return table_[static_cast<std::size_t>(n) * (k_max_ + 1) + k];
    }

    int n_max() const { return n_max_; }
    int k_max() const { return k_max_; }

  private:
    std::uint64_t& at(int n, int k) {
        return table_[static_cast<std::size_t>(n) * (k_max_ + 1) + k];
    }

    int n_max_, k_max_;
    std::vector<std::uint64_t> table_;
};

inline std::uint64_t partition_count(int n, int k) {
    if (n < 0 || k < 0)
        throw Error(errc::non_positive_parameter, "partition_count: negative argument");
    if (k == 0) return 1;
    if (n == 0) return 0;
    PartitionTable t(n, k);
    return t(n, k);
}

// All partitions with weight in [1, max_weight] and at most max_parts parts,
// enumerated in lexicographically decreasing part order. Used by the slow
// character-series oracles.
inline std::vector<Partition> enumerate_partitions(int max_weight, int max_parts) {
    std::vector<Partition> out;
    std::vector<int> parts;
    std::function<void(int, int)> rec = [&](int remaining, int cap) {
        if (!parts.empty()) out.push_back(Partition{parts});
        if (remaining == 0 || static_cast<int>(parts.size()) >= max_parts) return;
        for (int next = std::min(cap, remaining); next >= 1; --next) {
            parts.push_back(next);
            rec(remaining - next, next);
            parts.pop_back();
        }
    };
    if (max_weight >= 1 && max_parts >= 1) rec(max_weight, max_weight);
    return out;
}

}  // namespace haargof
