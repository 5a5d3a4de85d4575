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
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

namespace haargof {

enum class errc {
    non_square,
    not_orthogonal,
    not_symmetric,
    no_convergence,
    pairing_failure,
    dimension_mismatch,
    degenerate_spectrum,
    empty_sample,
    mixed_determinants,
    non_positive_parameter,
    degenerate_angles,
    degenerate_input,
    numerical,
    io,
};

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }

  private:
    errc code_;
};

// Exact product/determinant magnitudes routinely pass 10^±300 here (e.g. the
// (4z)^binom(25,2) factor), so intermediate values are carried as sign + log|value|
// and exponentiated once at the end.
struct SignedLog {
    int sign = 0;           // -1, 0, +1
    double logmag = -std::numeric_limits<double>::infinity();

    static SignedLog one() { return {1, 0.0}; }

    static SignedLog from_value(double v) {
        if (v == 0.0) return {0, -std::numeric_limits<double>::infinity()};
        return {v > 0 ? 1 : -1, std::log(std::fabs(v))};
    }

    SignedLog& operator*=(const SignedLog& o) {
        if (sign == 0 || o.sign == 0) {
            sign = 0;
            logmag = -std::numeric_limits<double>::infinity();
        } else {
            sign *= o.sign;
            logmag += o.logmag;
        }
        return *this;
    }
    friend SignedLog operator*(SignedLog a, const SignedLog& b) { return a *= b; }

    SignedLog& operator/=(const SignedLog& o) {
        if (o.sign == 0) throw Error(errc::numerical, "SignedLog: division by zero");
        if (sign != 0) {
            sign *= o.sign;
            logmag -= o.logmag;
        }
        return *this;
    }
    friend SignedLog operator/(SignedLog a, const SignedLog& b) { return a /= b; }

    SignedLog pow(int k) const {
        if (k == 0) return one();
        if (sign == 0) return *this;
        return {k % 2 == 0 ? 1 : sign, logmag * k};
    }

    double value() const { return sign * std::exp(logmag); }

    // Saturates instead of overflowing to inf; kernels evaluated at (near-)degenerate
    // inputs can legitimately produce astronomically large finite magnitudes.
    double value_saturated() const {
        return sign * std::exp(std::min(logmag, 709.0));
    }
};

inline double chi_square_upper_tail(double df, double x) {
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(df / 2.0, x / 2.0);
}

}  // namespace haargof
