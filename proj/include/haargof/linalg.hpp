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
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "haargof/common.hpp"

namespace haargof {

// U(n) / SO(2m+1) / Sp(2m) / SO(2m). Real matrices are labeled B or D by
// dimension parity; A enters only through the eigenphase-based kernel API.
enum class GroupType { A, B, C, D };

inline const char* group_name(GroupType g) {
    switch (g) {
        case GroupType::A: return "A";
        case GroupType::B: return "B";
        case GroupType::C: return "C";
        default: return "D";
    }
}

struct GroupElement {
    int dim = 0;
    Eigen::MatrixXd entries;
    int det_sign = +1;
    GroupType group = GroupType::B;
};

// Sorted (descending) eigenvalue cosines x_i = cos(theta_i) of a group
// element; the forced unit eigenvalues mandated by parity/determinant have
// already been dropped.
struct CosSpectrum {
    int m = 0;
    Eigen::VectorXd x;
    int source_det = +1;
};

constexpr double kDefaultOrthoTol = 1e-9;
constexpr double kDefaultPairingTol = 1e-6;

inline GroupElement validate_group_element(const Eigen::MatrixXd& M,
                                           double tol = kDefaultOrthoTol) {
    if (M.rows() != M.cols() || M.rows() == 0)
        throw Error(errc::non_square, "validate_group_element: matrix is not square");
    if (!M.allFinite())
        throw Error(errc::non_square, "validate_group_element: non-finite entries");
    const int n = static_cast<int>(M.rows());
    double defect = (M.transpose() * M - Eigen::MatrixXd::Identity(n, n))
                        .cwiseAbs()
                        .maxCoeff();
    if (defect > tol) {
        std::ostringstream os;
        os << "validate_group_element: orthogonality defect " << defect << " exceeds tol "
           << tol;
        throw Error(errc::not_orthogonal, os.str());
    }
    GroupElement g;
    g.dim = n;
    g.entries = M;
    g.det_sign = M.determinant() > 0.0 ? +1 : -1;
    g.group = (n % 2 == 1) ? GroupType::B : GroupType::D;
    return g;
}

inline Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& S,
                                             double tol = kDefaultOrthoTol,
                                             bool check_reconstruction = false) {
    if (S.rows() != S.cols() || S.rows() == 0)
        throw Error(errc::non_square, "symmetric_eigenvalues: matrix is not square");
    double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol) {
        std::ostringstream os;
        os << "symmetric_eigenvalues: asymmetry " << asym << " exceeds tol " << tol;
        throw Error(errc::not_symmetric, os.str());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    if (check_reconstruction) {
        solver.compute(S);
        if (solver.info() != Eigen::Success)
            throw Error(errc::no_convergence, "symmetric_eigenvalues: solver did not converge");
        Eigen::MatrixXd recon = solver.eigenvectors() *
                                solver.eigenvalues().asDiagonal() *
                                solver.eigenvectors().transpose();
        double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
        if ((recon - S).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw Error(errc::no_convergence, "symmetric_eigenvalues: reconstruction check failed");
    } else {
        solver.compute(S, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success)
            throw Error(errc::no_convergence, "symmetric_eigenvalues: solver did not converge");
    }
    return solver.eigenvalues().reverse();
}

namespace detail {

// Drop-and-pair rule on the descending cosine list of (g + g^T)/2. The forced
// eigenvalues (+1 at the top and/or -1 at the bottom, dictated by dimension
// parity and determinant sign) are removed by *position*, which keeps the rule
// deterministic even when genuine angles sit at the spectrum edge; a pairing
// mismatch then surfaces as PairingFailure rather than a silent misparity.
inline CosSpectrum pair_descending_cosines(const Eigen::VectorXd& vals, int dim, int det_sign,
                                           double pairing_tol) {
    int lo = 0;                              // first index kept
    int hi = static_cast<int>(vals.size());  // one past last index kept
    if (dim % 2 == 1) {
        if (det_sign > 0)
            lo = 1;  // forced +1
        else
            hi -= 1;  // forced -1
    } else if (det_sign < 0) {
        lo = 1;  // forced +1 and -1 in O(2m) \ SO(2m)
        hi -= 1;
    }
    int m = (hi - lo) / 2;
    CosSpectrum spec;
    spec.m = m;
    spec.source_det = det_sign;
    spec.x.resize(m);
    for (int i = 0; i < m; ++i) {
        double a = vals[lo + 2 * i];
        double b = vals[lo + 2 * i + 1];
        if (std::fabs(a - b) > pairing_tol) {
            std::ostringstream os;
            os << "cos_spectrum: pair " << i << " split by " << std::fabs(a - b)
               << " exceeds pairing tol " << pairing_tol;
            throw Error(errc::pairing_failure, os.str());
        }
        spec.x[i] = std::clamp(0.5 * (a + b), -1.0, 1.0);
    }
    return spec;
}

}  // namespace detail

inline CosSpectrum cos_spectrum(const GroupElement& g,
                                double pairing_tol = kDefaultPairingTol) {
    Eigen::MatrixXd S = 0.5 * (g.entries + g.entries.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw Error(errc::no_convergence, "cos_spectrum: eigensolver did not converge");
    Eigen::VectorXd vals = solver.eigenvalues().reverse();
    return detail::pair_descending_cosines(vals, g.dim, g.det_sign, pairing_tol);
}

inline CosSpectrum relative_spectrum(const GroupElement& g, const GroupElement& h,
                                     double pairing_tol = kDefaultPairingTol) {
    if (g.dim != h.dim || g.group != h.group)
        throw Error(errc::dimension_mismatch,
                    "relative_spectrum: operands have different dimension or group");
    // Symmetric part of g h^T assembled directly; g h^T is orthogonal by
    // construction so no validation pass is spent on the N^2 hot path.
    Eigen::MatrixXd P = g.entries * h.entries.transpose();
    Eigen::MatrixXd S = 0.5 * (P + P.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw Error(errc::no_convergence, "relative_spectrum: eigensolver did not converge");
    Eigen::VectorXd vals = solver.eigenvalues().reverse();
    return detail::pair_descending_cosines(vals, g.dim, g.det_sign * h.det_sign, pairing_tol);
}

// ---------------------------------------------------------------------------
// Matrix sample file format: line 1 is "n N", followed by N blocks of n lines,
// each line n whitespace-separated floats at 17 significant digits.
// ---------------------------------------------------------------------------

inline void write_sample(std::ostream& os, const std::vector<GroupElement>& sample) {
    if (sample.empty()) throw Error(errc::empty_sample, "write_sample: empty sample");
    const int n = sample[0].dim;
    os << n << " " << sample.size() << "\n";
    os << std::setprecision(17);
    for (const GroupElement& g : sample) {
        if (g.dim != n)
            throw Error(errc::dimension_mismatch, "write_sample: mixed dimensions");
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                if (c) os << " ";
                os << g.entries(r, c);
            }
            os << "\n";
        }
    }
    if (!os) throw Error(errc::io, "write_sample: stream failure");
}

inline void write_sample_file(const std::string& path, const std::vector<GroupElement>& sample) {
    std::ofstream os(path);
    if (!os) throw Error(errc::io, "write_sample_file: cannot open " + path);
    write_sample(os, sample);
}

inline std::vector<GroupElement> read_sample(std::istream& is,
                                             double tol = kDefaultOrthoTol) {
    int n = 0;
    long long N = 0;
    if (!(is >> n >> N) || n <= 0 || N <= 0)
        throw Error(errc::io, "read_sample: malformed header (expected \"n N\")");
    std::vector<GroupElement> sample;
    sample.reserve(static_cast<std::size_t>(N));
    Eigen::MatrixXd M(n, n);
    for (long long b = 0; b < N; ++b) {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (!(is >> M(r, c)))
                    throw Error(errc::io, "read_sample: truncated matrix block");
        sample.push_back(validate_group_element(M, tol));
    }
    return sample;
}

inline std::vector<GroupElement> read_sample_file(const std::string& path,
                                                  double tol = kDefaultOrthoTol) {
    std::ifstream is(path);
    if (!is) throw Error(errc::io, "read_sample_file: cannot open " + path);
    return read_sample(is, tol);
}

}  // namespace haargof
