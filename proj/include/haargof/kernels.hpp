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
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "haargof/common.hpp"
#include "haargof/linalg.hpp"
#include "haargof/partitions.hpp"

namespace haargof {

struct KernelParams {
    double z = 0.5;
    double q = 0.5;                   // weight-family decay (U statistic only)
    double vandermonde_jitter = 1e-7;  // deterministic separation applied to degenerate spectra
    double degeneracy_tol = 1e-5;      // spacing below which a spectrum counts as degenerate
    bool strict_degenerate = false;    // throw instead of jittering
    int uq_rank_bound = 0;             // 0 = use the input rank; override to test larger truncations
};

namespace detail {

inline void require_unit_interval(double v, const char* name) {
    if (!(v > 0.0) || !(v < 1.0)) {
        std::string msg = std::string(name) + " must lie in (0,1)";
        throw Error(errc::non_positive_parameter, msg);
    }
}

// Deterministic de-degeneration of a descending cosine vector: x_i -> x_i -
// delta*i, clamped to stay inside [-1, 1], which guarantees consecutive
// separation >= delta while moving no entry by more than m*delta.
inline Eigen::ArrayXd jitter_descending(const Eigen::ArrayXd& x, double delta) {
    const int m = static_cast<int>(x.size());
    Eigen::ArrayXd out(m);
    for (int i = 0; i < m; ++i) {
        double lo = -1.0 + delta * (m - 1 - i);
        double hi = 1.0 - delta * i;
        out[i] = std::clamp(x[i] - delta * i, lo, hi);
    }
    return out;
}

inline bool has_degenerate_gap(const Eigen::ArrayXd& x_desc, double tol) {
    for (int i = 0; i + 1 < x_desc.size(); ++i)
        if (x_desc[i] - x_desc[i + 1] < tol) return true;
    return false;
}

inline SignedLog log_vandermonde(const Eigen::ArrayXd& x) {
    SignedLog v = SignedLog::one();
    for (int k = 0; k < x.size(); ++k)
        for (int l = k + 1; l < x.size(); ++l) v *= SignedLog::from_value(x[k] - x[l]);
    return v;
}

inline SignedLog log_det_lu(Eigen::MatrixXd& M) {
    Eigen::PartialPivLU<Eigen::Ref<Eigen::MatrixXd>> lu(M);
    SignedLog det = SignedLog::from_value(
        static_cast<double>(lu.permutationP().determinant()));
    for (int i = 0; i < M.rows(); ++i) {
        double piv = lu.matrixLU()(i, i);
        if (piv == 0.0)
            throw Error(errc::numerical, "cauchy_kernel: singular kernel matrix");
        det *= SignedLog::from_value(piv);
    }
    return det;
}

}  // namespace detail

// Per-spectrum quantities reused across the O(N^2) kernel pair loop: the
// (possibly jittered) cosines, the doubled-angle cosines w = 2x^2 - 1, and
// the log-Vandermonde.
struct PreparedSpectrum {
    Eigen::ArrayXd x;
    Eigen::ArrayXd w;
    SignedLog vdm;
};

inline PreparedSpectrum prepare_spectrum(const Eigen::VectorXd& cosines,
                                         const KernelParams& params,
                                         long long* jitter_events = nullptr) {
    Eigen::ArrayXd x = cosines.array();
    std::sort(x.data(), x.data() + x.size(), std::greater<double>());
    if (detail::has_degenerate_gap(x, params.degeneracy_tol)) {
        if (params.strict_degenerate)
            throw Error(errc::degenerate_spectrum,
                        "prepare_spectrum: coincident cosines in strict mode");
        x = detail::jitter_descending(x, params.vandermonde_jitter);
        if (jitter_events) ++(*jitter_events);
    }
    PreparedSpectrum p;
    p.x = x;
    p.w = 2.0 * x.square() - 1.0;
    p.vdm = detail::log_vandermonde(x);
    return p;
}

// Closed-form evaluation of K_z(g, h) = sum_{lambda != 0} z^{|lambda|}
// chi_lambda(g) chi_lambda(h) for the real groups, on cosine spectra:
//
//   type B (SO(2m+1)):  K + 1 = (1-z)^m   det[ N^B_kl / D_kl ] / P
//   type C (Sp(2m)):    K + 1 = (1-z^2)^m det[ 1     / D_kl ] / P
//   type D (SO(2m)):    K + 1 =           det[ N^D_kl / D_kl ] / P
//
// with P = (4z)^{m(m-1)/2} vdm(x) vdm(y),
//      D_kl   = (1+z^2)^2 - 4z(1+z^2) x_k y_l + 2z^2 (w_k + w_l)
//             = (1 - 2z cos(t_k+s_l) + z^2)(1 - 2z cos(t_k-s_l) + z^2),
//      N^B_kl = (1+z)^2 + 2z (x_k + y_l),
//      N^D_kl = 2 [ 2(1+z^2) - 2z(3+z^2) x_k y_l + 2z^2 (w_k + w_l) ].
//
// All magnitudes are carried in signed-log form ((4z)^300 and the
// Vandermondes at m=25 are far outside double range) and combined before a
// single saturated exponentiation.
inline double cauchy_kernel_prepared(GroupType type, const PreparedSpectrum& a,
                                     const PreparedSpectrum& b, double z) {
    detail::require_unit_interval(z, "z");
    if (a.x.size() != b.x.size())
        throw Error(errc::dimension_mismatch, "cauchy_kernel: rank mismatch");
    const int m = static_cast<int>(a.x.size());
    if (m == 0) return 0.0;

    const double z2 = z * z;
    const double c0 = (1.0 + z2) * (1.0 + z2);
    const double c1 = 4.0 * z * (1.0 + z2);
    Eigen::MatrixXd M(m, m);
    switch (type) {
        case GroupType::B: {
            const double nb = (1.0 + z) * (1.0 + z);
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l)
                    M(k, l) = (nb + 2.0 * z * (a.x[k] + b.x[l])) /
                              (c0 - c1 * a.x[k] * b.x[l] + 2.0 * z2 * (a.w[k] + b.w[l]));
            break;
        }
        case GroupType::C: {
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l)
                    M(k, l) = 1.0 /
                              (c0 - c1 * a.x[k] * b.x[l] + 2.0 * z2 * (a.w[k] + b.w[l]));
            break;
        }
        case GroupType::D: {
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l)
                    M(k, l) = 2.0 *
                              (2.0 * (1.0 + z2) - 2.0 * z * (3.0 + z2) * a.x[k] * b.x[l] +
                               2.0 * z2 * (a.w[k] + b.w[l])) /
                              (c0 - c1 * a.x[k] * b.x[l] + 2.0 * z2 * (a.w[k] + b.w[l]));
            break;
        }
        default:
            throw Error(errc::dimension_mismatch,
                        "cauchy_kernel: cosine form is defined for types B, C, D only");
    }

    SignedLog result = detail::log_det_lu(M);
    if (type == GroupType::B)
        result *= SignedLog::from_value(1.0 - z).pow(m);
    else if (type == GroupType::C)
        result *= SignedLog::from_value(1.0 - z2).pow(m);
    result /= SignedLog::from_value(4.0 * z).pow(m * (m - 1) / 2);
    result /= a.vdm;
    result /= b.vdm;
    return result.value_saturated() - 1.0;
}

// Type A (U(n)) kernel on eigenphases: K + 1 = prod_{i,j} 1/(1 - z e^{i(t_i -
// s_j)}). Every factor has modulus in [1-z, 1+z] and positive real part, so
// accumulating principal logs is branch-safe.
inline std::complex<double> cauchy_kernel_unitary(const Eigen::VectorXd& theta_x,
                                                  const Eigen::VectorXd& theta_y, double z) {
    detail::require_unit_interval(z, "z");
    if (theta_x.size() != theta_y.size())
        throw Error(errc::dimension_mismatch, "cauchy_kernel: rank mismatch");
    std::complex<double> logsum = 0.0;
    for (int i = 0; i < theta_x.size(); ++i)
        for (int j = 0; j < theta_y.size(); ++j) {
            double d = theta_x[i] - theta_y[j];
            logsum -= std::log(std::complex<double>(1.0 - z * std::cos(d), -z * std::sin(d)));
        }
    return std::exp(logsum) - 1.0;
}

// Dispatcher on raw spectra. B/C/D take cosine vectors; A takes eigenphases
// (its Hermitian kernel's real part is what symmetrized statistics consume).
inline double cauchy_kernel(GroupType type, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                            const KernelParams& params, long long* jitter_events = nullptr) {
    if (type == GroupType::A) return cauchy_kernel_unitary(x, y, params.z).real();
    PreparedSpectrum a = prepare_spectrum(x, params, jitter_events);
    PreparedSpectrum b = prepare_spectrum(y, params, jitter_events);
    return cauchy_kernel_prepared(type, a, b, params.z);
}

// ---------------------------------------------------------------------------
// U-family closed-form summand u(x) = sum_{lambda != 0} c_lambda(z, q)
// chi_lambda with the product bounds fixed at the group rank:
//
//   type B: u+1 = [prod_{i<j<=n}(1 - z^2 q^{i+j-2}) prod_{i<=n}(1 + z q^{i-1})]
//                 / prod_{i<=n} prod_{j<=m} (1 - 2 z q^{i-1} x_j + z^2 q^{2(i-1)})
//   type C: numerator product over i<j only;
//   type D: numerator product over i<=j;
//   type A: u+1 = prod_{l<=n} prod_{k<=n} 1/(1 - z q^{l-1} y_k) on eigenphases.
//
// Every real factor is strictly positive for z, q in (0,1), so plain
// log-accumulation suffices.
// ---------------------------------------------------------------------------
class UqEvaluator {
  public:
    UqEvaluator(GroupType type, int rank, const KernelParams& params)
        : type_(type), m_(rank), z_(params.z), q_(params.q) {
        detail::require_unit_interval(z_, "z");
        detail::require_unit_interval(q_, "q");
        if (rank < 0) throw Error(errc::non_positive_parameter, "UqEvaluator: negative rank");
        bound_ = params.uq_rank_bound > 0 ? params.uq_rank_bound : rank;
        zq_.resize(bound_);
        one_plus_z2q2_.resize(bound_);
        double p = 1.0;  // q^{i-1}
        for (int i = 0; i < bound_; ++i) {
            zq_[i] = z_ * p;
            one_plus_z2q2_[i] = 1.0 + z_ * z_ * p * p;
            p *= q_;
        }
        log_num_ = 0.0;
        for (int i = 1; i <= bound_; ++i) {
            int j_lo = (type == GroupType::D) ? i : i + 1;
            for (int j = j_lo; j <= bound_; ++j)
                log_num_ += std::log1p(-z_ * z_ * std::pow(q_, i + j - 2));
            if (type == GroupType::B) log_num_ += std::log1p(zq_[i - 1]);
        }
        Eigen::ArrayXd ones = Eigen::ArrayXd::Ones(m_);
        diagonal_ = evaluate(ones);
    }

    // u at the all-ones spectrum: the constant diagonal term of the
    // V-statistic.
    double diagonal() const { return diagonal_; }
    int rank() const { return m_; }

    double evaluate(const Eigen::ArrayXd& x) const {
        if (static_cast<int>(x.size()) != m_)
            throw Error(errc::dimension_mismatch, "UqEvaluator: spectrum rank mismatch");
        double log_den = 0.0;
        for (int i = 0; i < bound_; ++i)
            log_den += (one_plus_z2q2_[i] - 2.0 * zq_[i] * x).log().sum();
        double v = log_num_ - log_den;
        return std::exp(std::min(v, 709.0)) - 1.0;
    }

  private:
    GroupType type_;
    int m_;
    double z_, q_;
    int bound_;
    Eigen::ArrayXd zq_, one_plus_z2q2_;
    double log_num_ = 0.0;
    double diagonal_ = 0.0;
};

inline std::complex<double> uq_weight_sum_unitary(const Eigen::VectorXd& theta,
                                                  const KernelParams& params) {
    detail::require_unit_interval(params.z, "z");
    detail::require_unit_interval(params.q, "q");
    const int n = static_cast<int>(theta.size());
    const int bound = params.uq_rank_bound > 0 ? params.uq_rank_bound : n;
    std::complex<double> logsum = 0.0;
    double p = 1.0;
    for (int l = 0; l < bound; ++l) {
        for (int k = 0; k < n; ++k) {
            double r = params.z * p;
            logsum -= std::log(std::complex<double>(1.0 - r * std::cos(theta[k]),
                                                    -r * std::sin(theta[k])));
        }
        p *= params.q;
    }
    return std::exp(logsum) - 1.0;
}

inline double uq_weight_sum(GroupType type, const Eigen::VectorXd& x,
                            const KernelParams& params) {
    if (type == GroupType::A) return uq_weight_sum_unitary(x, params).real();
    UqEvaluator eval(type, static_cast<int>(x.size()), params);
    return eval.evaluate(x.array());
}

// ---------------------------------------------------------------------------
// Weyl character oracles (testing only). Type B: det[sin((l_j + m - j + 1/2)
// t_i)] / det[sin((m - j + 1/2) t_i)]; type C has offsets +1 instead of +1/2;
// type A is the Schur bialternant on e^{i t}. No type D oracle is provided:
// the SO(2m) character convention for lambda_m != 0 splits into +/- weight
// pairs, so the D kernel is validated by symmetry, the m=1 complex-factor
// cross-check, and series consistency in z instead.
// ---------------------------------------------------------------------------
namespace detail {

inline double sine_ratio_character(const Partition& lam, const Eigen::VectorXd& theta,
                                   double offset) {
    const int m = static_cast<int>(theta.size());
    if (lam.num_parts() > m)
        throw Error(errc::dimension_mismatch, "character: more parts than rank");
    Eigen::MatrixXd num(m, m), den(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double lj = j < lam.num_parts() ? lam.parts[j] : 0.0;
            num(i, j) = std::sin((lj + m - (j + 1) + offset) * theta[i]);
            den(i, j) = std::sin((m - (j + 1) + offset) * theta[i]);
        }
    double d = den.determinant();
    if (!std::isfinite(d) || std::fabs(d) < 1e-280)
        throw Error(errc::degenerate_angles, "character: Weyl denominator vanishes");
    return num.determinant() / d;
}

}  // namespace detail

inline std::complex<double> character_unitary(const Partition& lam,
                                              const Eigen::VectorXd& theta) {
    const int n = static_cast<int>(theta.size());
    if (lam.num_parts() > n)
        throw Error(errc::dimension_mismatch, "character: more parts than rank");
    Eigen::MatrixXcd num(n, n), den(n, n);
    for (int i = 0; i < n; ++i) {
        std::complex<double> xi(std::cos(theta[i]), std::sin(theta[i]));
        for (int j = 0; j < n; ++j) {
            double lj = j < lam.num_parts() ? lam.parts[j] : 0.0;
            num(i, j) = std::pow(xi, lj + n - (j + 1));
            den(i, j) = std::pow(xi, static_cast<double>(n - (j + 1)));
        }
    }
    std::complex<double> d = den.determinant();
    if (!std::isfinite(std::abs(d)) || std::abs(d) < 1e-280)
        throw Error(errc::degenerate_angles, "character: Weyl denominator vanishes");
    return num.determinant() / d;
}

inline double character(GroupType type, const Partition& lam, const Eigen::VectorXd& theta) {
    if (lam.num_parts() == 0) return 1.0;
    switch (type) {
        case GroupType::B: return detail::sine_ratio_character(lam, theta, 0.5);
        case GroupType::C: return detail::sine_ratio_character(lam, theta, 1.0);
        case GroupType::A: return character_unitary(lam, theta).real();
        default:
            throw Error(errc::degenerate_angles, "character: no type D oracle");
    }
}

inline std::complex<double> kernel_series_oracle_unitary(const Eigen::VectorXd& theta_x,
                                                         const Eigen::VectorXd& theta_y,
                                                         double z, int max_weight) {
    const int n = static_cast<int>(theta_x.size());
    std::complex<double> s = 0.0;
    for (const Partition& lam : enumerate_partitions(max_weight, n))
        s += std::pow(z, lam.weight()) * character_unitary(lam, theta_x) *
             std::conj(character_unitary(lam, theta_y));
    return s;
}

// Brute-force partial sum of sum_{0 < |lambda| <= L} z^{|lambda|}
// chi_lambda(x) chi_lambda(y); the verification oracle for cauchy_kernel.
inline double kernel_series_oracle(GroupType type, const Eigen::VectorXd& theta_x,
                                   const Eigen::VectorXd& theta_y, double z, int max_weight) {
    if (theta_x.size() != theta_y.size())
        throw Error(errc::dimension_mismatch, "kernel_series_oracle: rank mismatch");
    if (type == GroupType::A)
        return kernel_series_oracle_unitary(theta_x, theta_y, z, max_weight).real();
    const int m = static_cast<int>(theta_x.size());
    double s = 0.0;
    for (const Partition& lam : enumerate_partitions(max_weight, m))
        s += std::pow(z, lam.weight()) * character(type, lam, theta_x) *
             character(type, lam, theta_y);
    return s;
}

}  // namespace haargof
