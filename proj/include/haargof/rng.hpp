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

#include <array>
#include <cmath>
#include <cstdint>

#include "haargof/common.hpp"

namespace haargof {

// Counter-based generator (Philox-4x32, 10 rounds). Chosen over the <random>
// engines because every draw must be bit-reproducible across platforms and
// because splitting into statistically independent child streams is a single
// block evaluation rather than a seeding heuristic. The std:: distributions
// are implementation-defined, so the variate transforms below are pinned here.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) {
        key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
        ctr_ = {0u, 0u, 0u, 0u};
    }

    // Derives a child stream that never overlaps the parent: one block of the
    // parent-keyed permutation maps the child index to a fresh (key, counter).
    RngStream split(std::uint64_t child_index) const {
        std::array<std::uint32_t, 4> c = {static_cast<std::uint32_t>(child_index),
                                          static_cast<std::uint32_t>(child_index >> 32),
                                          0x9E3779B9u, 0u};
        std::array<std::uint32_t, 4> out = block(c, key_);
        RngStream child(0);
        child.key_ = {out[0], out[1]};
        child.ctr_ = {0u, 0u, out[2], out[3]};
        return child;
    }

    std::uint32_t next_u32() {
        if (idx_ == 4) {
            buf_ = block(ctr_, key_);
            advance_counter();
            idx_ = 0;
        }
        return buf_[idx_++];
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw Error(errc::non_positive_parameter, "uniform_index: n must be positive");
        std::uint64_t rem = (UINT64_MAX % n + 1) % n;
        std::uint64_t limit = UINT64_MAX - rem;
        std::uint64_t u;
        do {
            u = next_u64();
        } while (u > limit);
        return u % n;
    }

    // Box-Muller; the companion variate is cached so draws come in exact pairs.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 2.0 * M_PI * u2;
        cached_ = r * std::sin(t);
        have_cached_ = true;
        return r * std::cos(t);
    }

    // Marsaglia-Tsang squeeze; alpha < 1 is boosted through gamma(alpha + 1).
    double gamma(double alpha) {
        if (alpha <= 0.0)
            throw Error(errc::non_positive_parameter, "gamma: shape must be positive");
        if (alpha < 1.0) {
            double u = 1.0 - uniform();
            return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
        }
        double d = alpha - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double t = 1.0 + c * x;
            if (t <= 0.0) continue;
            double v = t * t * t;
            double u = 1.0 - uniform();
            double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double chi_square(double df) { return 2.0 * gamma(df / 2.0); }

    // Raw counter-block permutation, exposed so the generator can be checked
    // against the published known-answer vectors.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> c,
                                              std::array<std::uint32_t, 2> k) {
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
            std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
            std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
            k[0] += kWey0;
            k[1] += kWey1;
        }
        return c;
    }

  private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWey0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWey1 = 0xBB67AE85u;

    void advance_counter() {
        for (int i = 0; i < 4; ++i) {
            if (++ctr_[i] != 0) break;
        }
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> buf_{};
    int idx_ = 4;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace haargof
