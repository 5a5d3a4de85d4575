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

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "haargof/common.hpp"
#include "haargof/kernels.hpp"
#include "haargof/linalg.hpp"
#include "haargof/selberg.hpp"

namespace haargof {

struct Warnings {
    long long jitter_events = 0;
    long long det_override_events = 0;
};

struct StatisticResult {
    std::string statistic_id;
    double value = 0.0;
    int N = 0;
    int n = 0;  // matrix dimension
    double z = std::numeric_limits<double>::quiet_NaN();
    double q = std::numeric_limits<double>::quiet_NaN();
    long long trace_k = 0;
    std::optional<double> pvalue;
    std::string pvalue_method = "none";
    Warnings warnings;
};

namespace detail {

inline std::pair<int, int> require_uniform_sample(const std::vector<GroupElement>& sample,
                                                  const char* who) {
    if (sample.empty())
        throw Error(errc::empty_sample, std::string(who) + ": empty sample");
    const int n = sample[0].dim;
    for (const GroupElement& g : sample)
        if (g.dim != n)
            throw Error(errc::dimension_mismatch, std::string(who) + ": mixed dimensions");
    return {n, static_cast<int>(sample.size())};
}

}  // namespace detail

// T_R = n N Tr(gbar^T gbar); asymptotically chi^2 with n^2 degrees of
// freedom under uniformity.
inline StatisticResult rayleigh(const std::vector<GroupElement>& sample,
                                bool with_pvalue = false) {
    auto [n, N] = detail::require_uniform_sample(sample, "rayleigh");
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, n);
    for (const GroupElement& g : sample) mean += g.entries;
    mean /= static_cast<double>(N);
    StatisticResult r;
    r.statistic_id = "rayleigh";
    r.N = N;
    r.n = n;
    r.value = static_cast<double>(n) * N * mean.squaredNorm();
    if (with_pvalue) {
        r.pvalue = chi_square_upper_tail(static_cast<double>(n) * n, r.value);
        r.pvalue_method = "chi2_n2";
    }
    return r;
}

// T_G = (1/N) sum_{i,j} sqrt(Tr(I - g_i^T g_j)); the radicand is clamped at
// zero (analytically nonnegative, floating point may dip below).
inline StatisticResult gine(const std::vector<GroupElement>& sample) {
    auto [n, N] = detail::require_uniform_sample(sample, "gine");
    double acc = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) {
            double inner = sample[i].entries.cwiseProduct(sample[j].entries).sum();
            acc += std::sqrt(std::max(0.0, static_cast<double>(n) - inner));
        }
    StatisticResult r;
    r.statistic_id = "gine";
    r.N = N;
    r.n = n;
    r.value = 2.0 * acc / static_cast<double>(N);
    return r;
}

namespace detail {

inline void check_det(const GroupElement& g, bool allow_det_minus, Warnings& w,
                      const char* who) {
    if (g.det_sign < 0) {
        if (!allow_det_minus)
            throw Error(errc::mixed_determinants,
                        std::string(who) +
                            ": sample contains det -1 elements (pass the det -1 override "
                            "to accept them)");
        ++w.det_override_events;
    }
}

}  // namespace detail

// Sufficient statistic of the exponential family embedding the null
// eigenvalue density: T1 = 2 sum_{i<j} log|x_i - x_j|, T2 = sum log(1 - x_i),
// T3 = sum log(1 + x_i), referred to mu = grad A and Sigma = hess A / N; the
// quadratic form is asymptotically chi^2_3.
inline StatisticResult expfam_statistic(const std::vector<GroupElement>& sample,
                                        bool allow_det_minus = false) {
    auto [n, N] = detail::require_uniform_sample(sample, "expfam_statistic");
    StatisticResult r;
    r.statistic_id = "expfam";
    r.N = N;
    r.n = n;

    int m = -1;
    Eigen::Vector3d tbar = Eigen::Vector3d::Zero();
    const double clamp = 1.0 - 1e-12;
    for (const GroupElement& g : sample) {
        detail::check_det(g, allow_det_minus, r.warnings, "expfam_statistic");
        CosSpectrum spec = cos_spectrum(g);
        if (m < 0) m = spec.m;
        if (spec.m != m)
            throw Error(errc::dimension_mismatch, "expfam_statistic: mixed spectrum ranks");
        Eigen::ArrayXd x = spec.x.array().min(clamp).max(-clamp);
        double t1 = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                double d = std::fabs(x[i] - x[j]);
                if (d == 0.0)
                    throw Error(errc::degenerate_spectrum,
                                "expfam_statistic: coincident cosines make T1 = -inf");
                t1 += std::log(d);
            }
        tbar[0] += 2.0 * t1;
        tbar[1] += (1.0 - x).log().sum();
        tbar[2] += (1.0 + x).log().sum();
    }
    if (m < 1)
        throw Error(errc::degenerate_spectrum, "expfam_statistic: empty spectra (dim too small)");
    tbar /= static_cast<double>(N);

    SelbergDerivatives sd = selberg_derivatives(m, ExpFamParams::reference());
    Eigen::Vector3d d = tbar - sd.grad;
    // Sigma = hess / N, so the quadratic form is N * d^T hess^{-1} d.
    r.value = static_cast<double>(N) * d.dot(sd.hess.ldlt().solve(d));
    r.pvalue = chi_square_upper_tail(3.0, r.value);
    r.pvalue_method = "chi2_3";
    return r;
}

// T_z as the kernel double sum (1/N) sum_{i,j} K_z(x_i, x_j) over the cosine
// spectra of an SO(2m+1) sample.
inline StatisticResult t_z(const std::vector<GroupElement>& sample, const KernelParams& params,
                           bool allow_det_minus = false) {
    auto [n, N] = detail::require_uniform_sample(sample, "t_z");
    if (n % 2 == 0)
        throw Error(errc::dimension_mismatch,
                    "t_z: defined for odd-dimensional (type B) samples");
    StatisticResult r;
    r.statistic_id = "tz";
    r.N = N;
    r.n = n;
    r.z = params.z;

    std::vector<PreparedSpectrum> prepared;
    prepared.reserve(N);
    for (const GroupElement& g : sample) {
        detail::check_det(g, allow_det_minus, r.warnings, "t_z");
        prepared.push_back(
            prepare_spectrum(cos_spectrum(g).x, params, &r.warnings.jitter_events));
    }
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
        acc += cauchy_kernel_prepared(GroupType::B, prepared[i], prepared[i], params.z);
        for (int j = i + 1; j < N; ++j)
            acc += 2.0 * cauchy_kernel_prepared(GroupType::B, prepared[i], prepared[j], params.z);
    }
    r.value = acc / static_cast<double>(N);
    return r;
}

// U_{z,q} as the V-statistic (1/N) sum_{k,l} u(relative spectrum of g_k
// g_l^T); the diagonal contributes N * u(all-ones) once.
inline StatisticResult u_zq(const std::vector<GroupElement>& sample, const KernelParams& params,
                            bool allow_det_minus = false) {
    auto [n, N] = detail::require_uniform_sample(sample, "u_zq");
    StatisticResult r;
    r.statistic_id = "uzq";
    r.N = N;
    r.n = n;
    r.z = params.z;
    r.q = params.q;

    // A constant-determinant sample (all +1 or all -1) is fine as-is: every
    // pair product lands in SO(n). Mixed signs need the explicit override.
    bool any_minus = false, any_plus = false;
    for (const GroupElement& g : sample) (g.det_sign < 0 ? any_minus : any_plus) = true;
    if (any_minus && any_plus) {
        if (!allow_det_minus)
            throw Error(errc::mixed_determinants,
                        "u_zq: sample mixes determinant signs (pass the det -1 override to "
                        "accept)");
        for (const GroupElement& g : sample)
            if (g.det_sign < 0) ++r.warnings.det_override_events;
    }

    const GroupType type = sample[0].group;
    // Relative spectra of det -1 pairs on even dimension drop one angle pair,
    // so evaluators are cached by rank.
    std::map<int, UqEvaluator> evals;
    auto eval_for = [&](int rank) -> const UqEvaluator& {
        auto it = evals.find(rank);
        if (it == evals.end())
            it = evals.emplace(rank, UqEvaluator(type, rank, params)).first;
        return it->second;
    };

    const int diag_rank = (n % 2 == 1) ? (n - 1) / 2 : n / 2;
    double acc = static_cast<double>(N) * eval_for(diag_rank).diagonal();
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) {
            CosSpectrum rel = relative_spectrum(sample[i], sample[j]);
            acc += 2.0 * eval_for(rel.m).evaluate(rel.x.array());
        }
    r.value = acc / static_cast<double>(N);
    return r;
}

// C_k = (1/N) sum_i Tr(g_i^k), computed from the cosine spectrum via the
// Chebyshev recurrence cos(k t) = T_k(cos t) plus the forced-eigenvalue term.
inline StatisticResult trace_power(const std::vector<GroupElement>& sample, long long k) {
    auto [n, N] = detail::require_uniform_sample(sample, "trace_power");
    if (k < 1) throw Error(errc::non_positive_parameter, "trace_power: k must be >= 1");
    StatisticResult r;
    r.statistic_id = "trace";
    r.N = N;
    r.n = n;
    r.trace_k = k;
    double acc = 0.0;
    for (const GroupElement& g : sample) {
        CosSpectrum spec = cos_spectrum(g);
        double det_term;
        if (n % 2 == 1)
            det_term = g.det_sign > 0 ? 1.0 : (k % 2 == 0 ? 1.0 : -1.0);
        else
            det_term = g.det_sign > 0 ? 0.0 : (k % 2 == 0 ? 2.0 : 0.0);
        Eigen::ArrayXd tkm1 = Eigen::ArrayXd::Ones(spec.m);  // T_0
        Eigen::ArrayXd tk = spec.x.array();                  // T_1
        for (long long step = 1; step < k; ++step) {
            Eigen::ArrayXd next = 2.0 * spec.x.array() * tk - tkm1;
            tkm1.swap(tk);
            tk.swap(next);
        }
        acc += det_term + 2.0 * tk.sum();
    }
    r.value = acc / static_cast<double>(N);
    return r;
}

}  // namespace haargof
