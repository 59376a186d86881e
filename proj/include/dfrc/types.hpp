// SPDX-License-Identifier: Apache-2.0
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

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dfrc
{

using cd = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double speed_of_light = 299792458.0;

/// Convolution model used to build, design and apply a filter bank.
enum class Flavor
{
    linear,
    circular
};

std::string to_string(Flavor f);
Flavor flavor_from_string(const std::string &s);

// ---- errors -------------------------------------------------------------

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
    virtual const char *kind() const noexcept { return "runtime-error"; }
};

class InvalidArgument : public Error
{
public:
    using Error::Error;
    const char *kind() const noexcept override { return "invalid-argument"; }
};

/// Raised when (K, L, L_f) violate the solvability bounds of the block system.
class DimensionError : public Error
{
public:
    DimensionError(const std::string &msg, std::string bound)
        : Error(msg), bound_(std::move(bound)) {}
    const char *kind() const noexcept override { return "dimension-error"; }
    const std::string &bound() const noexcept { return bound_; }

private:
    std::string bound_;
};

class ConditioningError : public Error
{
public:
    ConditioningError(const std::string &msg, double condition)
        : Error(msg), condition_(condition) {}
    const char *kind() const noexcept override { return "conditioning-error"; }
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

class InfeasibleError : public Error
{
public:
    using Error::Error;
    const char *kind() const noexcept override { return "infeasible-error"; }
};

} // namespace dfrc
