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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "haargof/common.hpp"
#include "haargof/partitions.hpp"
#include "haargof/rng.hpp"

namespace haargof {

struct TzMoments {
    double mean = 0.0;
    double variance = 0.0;
};

// E(T_z) = prod_{i=1}^n (1-z^i)^{-1} - 1 and Var(T_z) = 2 (prod_{i=1}^n
// (1-z^{2i})^{-1} - 1), from the partition generating function.
inline TzMoments tz_null_moments(int n, double z) {
    if (n < 1) throw Error(errc::non_positive_parameter, "tz_null_moments: n must be >= 1");
    if (!(z > 0.0) || !(z < 1.0))
        throw Error(errc::non_positive_parameter, "tz_null_moments: z must lie in (0,1)");
    double pm = 1.0, pv = 1.0;
    double zi = 1.0, z2i = 1.0;
    for (int i = 1; i <= n; ++i) {
        zi *= z;
        z2i *= z * z;
        pm /= 1.0 - zi;
        pv /= 1.0 - z2i;
    }
    return {pm - 1.0, 2.0 * (pv - 1.0)};
}

// Truncated mixture T_z ~ sum_{k=1}^K z^k chi^2_{p(n,k)}; K=0 selects the
// smallest truncation whose omitted tail mean is <= tail_tol * mean.
struct NullMixtureSpec {
    int n = 25;
    double z = 0.5;
    int K = 0;
    std::uint64_t seed = 0;
    double tail_tol = 1e-8;
};

struct MixtureTerm {
    double weight = 0.0;  // z^k
    double dof = 0.0;     // p(n, k)
};

inline std::vector<MixtureTerm> mixture_terms(const NullMixtureSpec& spec) {
    if (spec.n < 1 || !(spec.z > 0.0) || !(spec.z < 1.0))
        throw Error(errc::non_positive_parameter, "mixture_terms: invalid n or z");
    const double mean = tz_null_moments(spec.n, spec.z).mean;
    auto build = [&](int K) {
        PartitionTable table(spec.n, K);
        std::vector<MixtureTerm> terms(K);
        double w = 1.0;
        for (int k = 1; k <= K; ++k) {
            w *= spec.z;
            terms[k - 1] = {w, static_cast<double>(table(spec.n, k))};
        }
        return terms;
    };
    if (spec.K > 0) return build(spec.K);
    const double target = spec.tail_tol * mean;
    for (int K = 16;; K *= 2) {
        std::vector<MixtureTerm> terms;
        try {
            terms = build(K);
        } catch (const Error& e) {
            if (e.code() == errc::numerical)
                throw Error(errc::numerical,
                            "mixture_terms: truncation tolerance unreachable before the "
                            "partition table overflows (z too close to 1)");
            throw;
        }
        double partial = 0.0;
        for (const MixtureTerm& t : terms) partial += t.weight * t.dof;
        if (mean - partial <= target) {
            // trim back to the smallest K meeting the tolerance
            double tail = mean - partial;
            int K_min = K;
            for (int k = K; k >= 2; --k) {
                tail += terms[k - 1].weight * terms[k - 1].dof;
                if (tail > target) break;
                K_min = k - 1;
            }
            terms.resize(K_min);
            return terms;
        }
    }
}

// I.i.d. draws of the truncated mixture. Draw d consumes stream.split(d) and
// iterates terms in fixed k order, so runs with the same seed but different z
// share their chi-square variates term by term (monotone coupling in z).
inline std::vector<double> sample_null_mixture(const NullMixtureSpec& spec, long long draws) {
    if (draws < 1) throw Error(errc::non_positive_parameter, "sample_null_mixture: draws >= 1");
    std::vector<MixtureTerm> terms = mixture_terms(spec);
    RngStream root(spec.seed);
    std::vector<double> out(static_cast<std::size_t>(draws));
    for (long long d = 0; d < draws; ++d) {
        RngStream r = root.split(static_cast<std::uint64_t>(d));
        double s = 0.0;
        for (const MixtureTerm& t : terms) s += t.weight * r.chi_square(t.dof);
        out[static_cast<std::size_t>(d)] = s;
    }
    return out;
}

struct QuantileEstimate {
    double value = 0.0;
    double mc_stderr = 0.0;
};

namespace detail {

// Empirical quantile at 1-based order statistic ceil(p*M), with the
// order-statistics bracket standard error.
inline QuantileEstimate quantile_with_stderr(std::vector<double>& v, double prob) {
    std::sort(v.begin(), v.end());
    const std::size_t M = v.size();
    auto clamp_idx = [&](double r) {
        return std::min<std::size_t>(M - 1, static_cast<std::size_t>(std::max(0.0, r)));
    };
    std::size_t idx = clamp_idx(std::ceil(prob * static_cast<double>(M)) - 1.0);
    double half_width = 1.959963984540054 *
                        std::sqrt(prob * (1.0 - prob) * static_cast<double>(M));
    std::size_t lo = clamp_idx(prob * static_cast<double>(M) - half_width - 1.0);
    std::size_t hi = clamp_idx(prob * static_cast<double>(M) + half_width - 1.0);
    QuantileEstimate est;
    est.value = v[idx];
    est.mc_stderr = (v[hi] - v[lo]) / (2.0 * 1.959963984540054);
    return est;
}

}  // namespace detail

constexpr std::uint64_t kNullMixtureSeed = 0x7A11u;

inline QuantileEstimate tz_null_quantile(int n, double z, double prob, long long draws,
                                         std::uint64_t seed = kNullMixtureSeed) {
    if (!(prob > 0.0) || !(prob < 1.0))
        throw Error(errc::non_positive_parameter, "tz_null_quantile: prob must lie in (0,1)");
    NullMixtureSpec spec;
    spec.n = n;
    spec.z = z;
    spec.seed = seed;
    std::vector<double> v = sample_null_mixture(spec, draws);
    return detail::quantile_with_stderr(v, prob);
}

// Monte Carlo p-value P(T_z > value) under the null mixture.
inline double tz_mixture_pvalue(int n, double z, double value, long long draws = 100000,
                                std::uint64_t seed = kNullMixtureSeed) {
    NullMixtureSpec spec;
    spec.n = n;
    spec.z = z;
    spec.seed = seed;
    std::vector<double> v = sample_null_mixture(spec, draws);
    long long above = 0;
    for (double s : v)
        if (s > value) ++above;
    return static_cast<double>(above) / static_cast<double>(draws);
}

// Asymptotic local power P(sum_k z^k U_k > c_{z,1-alpha}) where the listed
// weights carry noncentral chi^2_1 components with noncentralities
// (eta^T h)^2 and everything else stays central. The cutoff comes from an
// independent null-mixture run at the same draw budget.
inline double local_power(int n, double z, double alpha,
                          const std::map<int, std::vector<double>>& noncentrality,
                          long long draws, std::uint64_t seed = kNullMixtureSeed + 1) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw Error(errc::non_positive_parameter, "local_power: alpha must lie in (0,1)");
    NullMixtureSpec spec;
    spec.n = n;
    spec.z = z;
    double cutoff = tz_null_quantile(n, z, 1.0 - alpha, draws).value;

    std::vector<MixtureTerm> terms = mixture_terms(spec);
    std::vector<std::vector<double>> deltas(terms.size());
    for (const auto& [weight, etas] : noncentrality) {
        if (weight < 1 || weight > static_cast<int>(terms.size()))
            throw Error(errc::non_positive_parameter,
                        "local_power: noncentrality at a weight beyond the truncation");
        for (double e2 : etas) {
            if (e2 < 0.0)
                throw Error(errc::non_positive_parameter,
                            "local_power: negative noncentrality");
            deltas[weight - 1].push_back(std::sqrt(e2));
        }
        if (deltas[weight - 1].size() > terms[weight - 1].dof)
            throw Error(errc::non_positive_parameter,
                        "local_power: more noncentral components than p(n,k)");
    }

    RngStream root(seed);
    long long above = 0;
    for (long long d = 0; d < draws; ++d) {
        RngStream r = root.split(static_cast<std::uint64_t>(d));
        double s = 0.0;
        for (std::size_t t = 0; t < terms.size(); ++t) {
            double contrib = 0.0;
            for (double del : deltas[t]) {
                double zn = r.normal() + del;
                contrib += zn * zn;
            }
            double central_dof = terms[t].dof - static_cast<double>(deltas[t].size());
            if (central_dof > 0.0) contrib += r.chi_square(central_dof);
            s += terms[t].weight * contrib;
        }
        if (s > cutoff) ++above;
    }
    return static_cast<double>(above) / static_cast<double>(draws);
}

}  // namespace haargof
