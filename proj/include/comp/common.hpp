// SPDX-License-Identifier: Apache-2.0
//
// comp-linksim: link-level simulation of cooperative multicell MIMO-OFDM
// Copyright (C) 2026 The comp-linksim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef COMP_COMMON_HPP
#define COMP_COMMON_HPP

#include <armadillo>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace comp
{
    using cplx = std::complex<double>;

    inline constexpr double pi = std::numbers::pi;

    // Error taxonomy. Every failure the library reports derives from one of the
    // standard exception types so callers can catch broadly or precisely.

    struct InvalidParameter : std::invalid_argument
    {
        using std::invalid_argument::invalid_argument;
    };

    struct InfeasibleGeometry : InvalidParameter
    {
        using InvalidParameter::InvalidParameter;
    };

    // Eigenvalue spectrum outside the range an analytic expression is defined on.
    struct InvalidSpectrum : std::domain_error
    {
        using std::domain_error::domain_error;
    };

    struct NumericError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    // Training Gram matrix too close to singular for the LS estimator.
    struct IllConditionedTraining : NumericError
    {
        using NumericError::NumericError;
    };

    // Estimated global channel not of full row rank; ZF cannot be formed.
    struct SingularChannel : NumericError
    {
        using NumericError::NumericError;
    };

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

    // Condition-number ceiling shared by LS estimation and ZF precoding.
    inline constexpr double max_condition_number = 1e12;

    // Relative Hermitian defect ||A - A^H||_F / ||A||_F.
    inline double hermitian_defect(const arma::cx_mat &A)
    {
        const double n = arma::norm(A, "fro");
        if (n == 0.0)
            return 0.0;
        return arma::norm(A - A.t(), "fro") / n;
    }
}

#endif
