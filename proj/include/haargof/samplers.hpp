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

#include <complex>
#include <cstdint>
#include <mutex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fftw3.h>

#include "haargof/common.hpp"
#include "haargof/linalg.hpp"
#include "haargof/rng.hpp"

namespace haargof {

enum class SamplerKind { haar, kac, reflections, jor };

inline const char* sampler_name(SamplerKind k) {
    switch (k) {
        case SamplerKind::haar: return "haar";
        case SamplerKind::kac: return "kac";
        case SamplerKind::reflections: return "reflections";
        default: return "jor";
    }
}

inline SamplerKind sampler_from_name(const std::string& s) {
    if (s == "haar") return SamplerKind::haar;
    if (s == "kac") return SamplerKind::kac;
    if (s == "reflections") return SamplerKind::reflections;
    if (s == "jor") return SamplerKind::jor;
    throw Error(errc::io, "unknown sampler kind: " + s);
}

struct SamplerSpec {
    SamplerKind kind = SamplerKind::haar;
    int dim = 2;
    long long steps = 0;  // walk steps for kac/reflections; iteration count for jor
    int m1 = 1;           // jor rotation-sweep counts per iteration
    int m2 = 1;
    std::uint64_t seed = 0;

    friend bool operator==(const SamplerSpec&, const SamplerSpec&) = default;
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

inline GroupElement tag_orthogonal(Eigen::MatrixXd M, int det_sign) {
    GroupElement g;
    g.dim = static_cast<int>(M.rows());
    g.group = (g.dim % 2 == 1) ? GroupType::B : GroupType::D;
    g.det_sign = det_sign;
    g.entries = std::move(M);
    return g;
}

}  // namespace detail

inline Eigen::VectorXd random_unit_vector(int n, RngStream& rng) {
    Eigen::VectorXd u(n);
    double norm2;
    do {
        for (int i = 0; i < n; ++i) u[i] = rng.normal();
        norm2 = u.squaredNorm();
    } while (norm2 <= 0.0);
    return u / std::sqrt(norm2);
}

// Fisher-Yates; `parity` receives the permutation sign (+1/-1).
inline std::vector<int> random_permutation(int n, RngStream& rng, int& parity) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    parity = +1;
    for (int i = n - 1; i >= 1; --i) {
        int j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1));
        if (j != i) {
            std::swap(p[i], p[j]);
            parity = -parity;
        }
    }
    return p;
}

// --------------------------------------------------------------------------
// Haar sampler: QR of an n x n standard Gaussian matrix, R-diagonal sign
// correction (makes Q Haar on O(n)), then one column negation to land in
// SO(n).
// --------------------------------------------------------------------------
inline GroupElement haar_orthogonal(int n, RngStream& rng) {
    if (n < 1) throw Error(errc::non_positive_parameter, "haar_orthogonal: n must be >= 1");
    Eigen::MatrixXd A(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) A(r, c) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::VectorXd diag = qr.matrixQR().diagonal();
    for (int c = 0; c < n; ++c)
        if (diag[c] < 0.0) Q.col(c) = -Q.col(c);
    if (Q.determinant() < 0.0) Q.col(0) = -Q.col(0);
    return detail::tag_orthogonal(std::move(Q), +1);
}

// --------------------------------------------------------------------------
// Kac's walk: left-multiplication by a rotation with angle uniform on
// [0, 2*pi) in a uniformly chosen coordinate plane {i, j}.
// --------------------------------------------------------------------------
inline void kac_step(Eigen::MatrixXd& M, RngStream& rng) {
    const int n = static_cast<int>(M.rows());
    int i = static_cast<int>(rng.uniform_index(n));
    int j = static_cast<int>(rng.uniform_index(n - 1));
    if (j >= i) ++j;
    if (i > j) std::swap(i, j);
    double theta = rng.uniform(0.0, 2.0 * M_PI);
    double c = std::cos(theta), s = std::sin(theta);
    for (int col = 0; col < n; ++col) {
        double a = M(i, col), b = M(j, col);
        M(i, col) = c * a + s * b;
        M(j, col) = -s * a + c * b;
    }
}

inline GroupElement kac_walk(int n, long long k, RngStream& rng) {
    if (n < 2) throw Error(errc::non_positive_parameter, "kac_walk: n must be >= 2");
    if (k < 0) throw Error(errc::non_positive_parameter, "kac_walk: k must be >= 0");
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
    for (long long s = 0; s < k; ++s) kac_step(M, rng);
    return detail::tag_orthogonal(std::move(M), +1);
}

// --------------------------------------------------------------------------
// Reflection walk: left-multiplication by I - 2 u u^T for u uniform on the
// unit sphere; k steps give determinant (-1)^k.
// --------------------------------------------------------------------------
inline void apply_reflection(Eigen::MatrixXd& M, const Eigen::VectorXd& u) {
    M.noalias() -= 2.0 * u * (u.transpose() * M);
}

inline void reflection_step(Eigen::MatrixXd& M, RngStream& rng) {
    apply_reflection(M, random_unit_vector(static_cast<int>(M.rows()), rng));
}

inline GroupElement reflection_walk(int n, long long k, RngStream& rng) {
    if (n < 1) throw Error(errc::non_positive_parameter, "reflection_walk: n must be >= 1");
    if (k < 0) throw Error(errc::non_positive_parameter, "reflection_walk: k must be >= 0");
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
    for (long long s = 0; s < k; ++s) reflection_step(M, rng);
    return detail::tag_orthogonal(std::move(M), k % 2 == 0 ? +1 : -1);
}

// --------------------------------------------------------------------------
// JOR pseudorandom orthogonal operator: Theta = (prod_i Q_i P_i) F (prod_j
// Q_j P_j) where each P is a uniform permutation, each Q is a sweep of n-1
// consecutive-coordinate rotations with angles uniform on [0, 2*pi), and F
// pairs coordinates into d = floor(n/2) complex slots, applies the unitary
// DFT, and unpacks (odd n leaves the last coordinate fixed). The operator
// form applies to a vector in O(n (log n + M1 + M2)).
// --------------------------------------------------------------------------
class JorOperator {
  public:
    JorOperator(int n, int m1, int m2, RngStream& rng)
        : n_(n), d_(n / 2), det_sign_(+1) {
        if (n < 1) throw Error(errc::non_positive_parameter, "JorOperator: n must be >= 1");
        if (m1 < 0 || m2 < 0)
            throw Error(errc::non_positive_parameter, "JorOperator: M1, M2 must be >= 0");
        right_ = sample_stages(m2, rng);
        left_ = sample_stages(m1, rng);
        if (d_ >= 2) {
            in_.resize(d_);
            out_.resize(d_);
            std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
            plan_ = fftw_plan_dft_1d(d_, reinterpret_cast<fftw_complex*>(in_.data()),
                                     reinterpret_cast<fftw_complex*>(out_.data()),
                                     FFTW_FORWARD, FFTW_ESTIMATE);
            if (plan_ == nullptr)
                throw Error(errc::numerical, "JorOperator: FFT planning failed");
        }
    }

    JorOperator(const JorOperator&) = delete;
    JorOperator& operator=(const JorOperator&) = delete;

    ~JorOperator() {
        if (plan_ != nullptr) {
            std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
            fftw_destroy_plan(plan_);
        }
    }

    int dim() const { return n_; }
    int det_sign() const { return det_sign_; }

    void apply_in_place(Eigen::VectorXd& v) const {
        if (v.size() != n_)
            throw Error(errc::dimension_mismatch, "JorOperator::apply: wrong vector length");
        for (const Stage& st : right_) apply_stage(st, v);
        apply_dft_block(v);
        for (const Stage& st : left_) apply_stage(st, v);
    }

    Eigen::MatrixXd materialize() const {
        Eigen::MatrixXd M(n_, n_);
        Eigen::VectorXd col(n_);
        for (int c = 0; c < n_; ++c) {
            col.setZero();
            col[c] = 1.0;
            apply_in_place(col);
            M.col(c) = col;
        }
        return M;
    }

  private:
    struct Stage {
        std::vector<int> perm;
        Eigen::ArrayXd cos, sin;  // n-1 rotation angles
    };

    std::vector<Stage> sample_stages(int count, RngStream& rng) {
        std::vector<Stage> stages(count);
        for (Stage& st : stages) {
            int parity;
            st.perm = random_permutation(n_, rng, parity);
            det_sign_ *= parity;
            st.cos.resize(n_ - 1);
            st.sin.resize(n_ - 1);
            for (int l = 0; l + 1 < n_; ++l) {
                double theta = rng.uniform(0.0, 2.0 * M_PI);
                st.cos[l] = std::cos(theta);
                st.sin[l] = std::sin(theta);
            }
        }
        return stages;
    }

    void apply_stage(const Stage& st, Eigen::VectorXd& v) const {
        scratch_.resize(n_);
        for (int i = 0; i < n_; ++i) scratch_[i] = v[st.perm[i]];
        for (int l = 0; l + 1 < n_; ++l) {
            double a = scratch_[l], b = scratch_[l + 1];
            scratch_[l] = st.cos[l] * a + st.sin[l] * b;
            scratch_[l + 1] = -st.sin[l] * a + st.cos[l] * b;
        }
        v = scratch_;
    }

    void apply_dft_block(Eigen::VectorXd& v) const {
        if (d_ < 2) return;  // the 1-point DFT is the identity
        for (int l = 0; l < d_; ++l) in_[l] = {v[2 * l], v[2 * l + 1]};
        fftw_execute(plan_);
        const double scale = 1.0 / std::sqrt(static_cast<double>(d_));
        for (int l = 0; l < d_; ++l) {
            v[2 * l] = out_[l].real() * scale;
            v[2 * l + 1] = out_[l].imag() * scale;
        }
    }

    int n_;
    int d_;
    int det_sign_;
    std::vector<Stage> left_, right_;
    mutable std::vector<std::complex<double>> in_, out_;
    mutable Eigen::VectorXd scratch_;
    fftw_plan plan_ = nullptr;
};

inline GroupElement jor_transform(int n, int m1, int m2, RngStream& rng) {
    JorOperator op(n, m1, m2, rng);
    return detail::tag_orthogonal(op.materialize(), op.det_sign());
}

// Product of `iterations` independent JOR operators (the chain's k-step law).
inline GroupElement jor_iterations(int n, long long iterations, int m1, int m2,
                                   RngStream& rng) {
    if (iterations < 1)
        throw Error(errc::non_positive_parameter, "jor_iterations: need >= 1 iteration");
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
    int det_sign = +1;
    Eigen::VectorXd col(n);
    for (long long it = 0; it < iterations; ++it) {
        JorOperator op(n, m1, m2, rng);
        det_sign *= op.det_sign();
        for (int c = 0; c < n; ++c) {
            col = M.col(c);
            op.apply_in_place(col);
            M.col(c) = col;
        }
    }
    return detail::tag_orthogonal(std::move(M), det_sign);
}

inline GroupElement draw_element(const SamplerSpec& spec, RngStream& rng) {
    switch (spec.kind) {
        case SamplerKind::haar: return haar_orthogonal(spec.dim, rng);
        case SamplerKind::kac: return kac_walk(spec.dim, spec.steps, rng);
        case SamplerKind::reflections: return reflection_walk(spec.dim, spec.steps, rng);
        default: return jor_iterations(spec.dim, std::max(spec.steps, 1LL), spec.m1, spec.m2, rng);
    }
}

// Matrix i of a sample uses stream.split(i), so samples are reproducible
// element-by-element regardless of evaluation order.
inline std::vector<GroupElement> draw_sample(const SamplerSpec& spec, const RngStream& stream,
                                             int N) {
    if (N < 1) throw Error(errc::empty_sample, "draw_sample: N must be >= 1");
    std::vector<GroupElement> out;
    out.reserve(N);
    for (int i = 0; i < N; ++i) {
        RngStream r = stream.split(static_cast<std::uint64_t>(i));
        out.push_back(draw_element(spec, r));
    }
    return out;
}

}  // namespace haargof
