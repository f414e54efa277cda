// Copyright 2026 The minkflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace minkflow {

/// Largest ambient dimension handled by the small fixed-capacity vector types.
inline constexpr int kMaxDim = 4;

/// Point / vector / covector in R^n, stack allocated (n <= kMaxDim).
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

enum class ErrorKind {
  DimensionMismatch,
  InvalidArgument,
  ZeroVector,
  DegenerateHessian,
  NewtonDivergence,
  StepSizeUnderflow,
  CoincidentPoints,
  UnsupportedCurvature,
  ZeroMass,
  SupportTooLarge,
  InfeasibleMarginals,
  NonConvergence,
  DegenerateScale,
  ZeroSecondMoment,
  StabilityViolation,
  NegativeDensity,
  LinearSolveFailure,
  AsymmetricNorm,
  DegenerateWindow,
  InvalidP,
  InvalidTriple,
  SupportOverflow,
  InconclusiveSlope,
  InvalidConfig,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Vec make_vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace minkflow
