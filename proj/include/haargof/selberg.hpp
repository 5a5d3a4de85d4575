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

#include <Eigen/Dense>

#include "haargof/common.hpp"

namespace haargof {

// Parameters of the exponential family whose log-normalizer is the Selberg
// integral; the null (Haar eigenvalue density) sits at (1, 3/2, 1/2).
struct ExpFamParams {
    double gamma = 1.0;
    double alpha = 1.5;
    double beta = 0.5;

    static ExpFamParams reference() { return {1.0, 1.5, 0.5}; }
};

// Digamma/trigamma by upward recurrence to argument >= 15 followed by the
// Bernoulli asymptotic series; accurate to ~1 ulp for x > 0, which is the
// only domain the Selberg normalizer ever touches.
inline double digamma(double x) {
    if (!(x > 0.0)) throw Error(errc::non_positive_parameter, "digamma: x must be > 0");
    double acc = 0.0;
    while (x < 15.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    double inv = 1.0 / x, inv2 = inv * inv;
    double series = std::log(x) - 0.5 * inv -
                    inv2 * (1.0 / 12.0 +
                            inv2 * (-1.0 / 120.0 +
                                    inv2 * (1.0 / 252.0 +
                                            inv2 * (-1.0 / 240.0 +
                                                    inv2 * (1.0 / 132.0 +
                                                            inv2 * (-691.0 / 32760.0 +
                                                                    inv2 * (1.0 / 12.0)))))));
    return acc + series;
}

inline double trigamma(double x) {
    if (!(x > 0.0)) throw Error(errc::non_positive_parameter, "trigamma: x must be > 0");
    double acc = 0.0;
    while (x < 15.0) {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    double inv = 1.0 / x, inv2 = inv * inv;
    double series =
        inv * (1.0 +
               inv * (0.5 +
                      inv * (1.0 / 6.0 +
                             inv2 * (-1.0 / 30.0 +
                                     inv2 * (1.0 / 42.0 +
                                             inv2 * (-1.0 / 30.0 +
                                                     inv2 * (5.0 / 66.0 +
                                                             inv2 * (-691.0 / 2730.0 +
                                                                     inv2 * (7.0 / 6.0)))))))));
    return acc + series;
}

struct SelbergDerivatives {
    double value = 0.0;
    Eigen::Vector3d grad = Eigen::Vector3d::Zero();   // d/d(gamma, alpha, beta)
    Eigen::Matrix3d hess = Eigen::Matrix3d::Zero();
};

// Log of the Selberg normalizer
//   A(gamma, alpha, beta) = log \int_{[-1,1]^n} prod_{i<j} |x_i-x_j|^{2 gamma}
//                           prod_i (1-x_i)^{alpha-1} (1+x_i)^{beta-1} dx,
// via the closed form on [-1,1]:
//   (gamma n(n-1) + n(alpha+beta-1)) log 2
//   + sum_{j=0}^{n-1} [ lgamma(1+gamma+j gamma) + lgamma(alpha+j gamma)
//                     + lgamma(beta+j gamma) - lgamma(1+gamma)
//                     - lgamma(alpha+beta+gamma(n+j-1)) ],
// with gradient/Hessian obtained by term-wise digamma/trigamma.
inline SelbergDerivatives selberg_derivatives(int n, const ExpFamParams& p) {
    if (n < 1) throw Error(errc::non_positive_parameter, "selberg_derivatives: n must be >= 1");
    const double g = p.gamma, a = p.alpha, b = p.beta;
    if (!(g > 0.0) || !(a > 0.0) || !(b > 0.0))
        throw Error(errc::non_positive_parameter,
                    "selberg_derivatives: gamma, alpha, beta must be > 0");

    SelbergDerivatives out;
    const double log2 = std::log(2.0);
    out.value = (g * n * (n - 1.0) + n * (a + b - 1.0)) * log2;
    out.grad[0] = n * (n - 1.0) * log2;
    out.grad[1] = n * log2;
    out.grad[2] = n * log2;

    for (int j = 0; j < n; ++j) {
        const double t1 = 1.0 + g + j * g;        // lgamma(1 + (1+j) gamma)
        const double t2 = a + j * g;
        const double t3 = b + j * g;
        const double t4 = 1.0 + g;
        const double t5 = a + b + g * (n + j - 1.0);
        const double w1 = 1.0 + j;                // d t1 / d gamma
        const double w5 = n + j - 1.0;            // d t5 / d gamma

        out.value += std::lgamma(t1) + std::lgamma(t2) + std::lgamma(t3) - std::lgamma(t4) -
                     std::lgamma(t5);

        const double d1 = digamma(t1), d2 = digamma(t2), d3 = digamma(t3), d4 = digamma(t4),
                     d5 = digamma(t5);
        out.grad[0] += w1 * d1 + j * d2 + j * d3 - d4 - w5 * d5;
        out.grad[1] += d2 - d5;
        out.grad[2] += d3 - d5;

        const double p1 = trigamma(t1), p2 = trigamma(t2), p3 = trigamma(t3),
                     p4 = trigamma(t4), p5 = trigamma(t5);
        out.hess(0, 0) += w1 * w1 * p1 + j * j * (p2 + p3) - p4 - w5 * w5 * p5;
        out.hess(0, 1) += j * p2 - w5 * p5;
        out.hess(0, 2) += j * p3 - w5 * p5;
        out.hess(1, 1) += p2 - p5;
        out.hess(1, 2) += -p5;
        out.hess(2, 2) += p3 - p5;
    }
    out.hess(1, 0) = out.hess(0, 1);
    out.hess(2, 0) = out.hess(0, 2);
    out.hess(2, 1) = out.hess(1, 2);
    return out;
}

}  // namespace haargof
