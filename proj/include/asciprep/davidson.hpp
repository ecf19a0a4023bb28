// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file davidson.hpp
 * @brief Lowest eigenpair of a real symmetric operator (Davidson–Jacobi).
 *
 * Diagonal preconditioner, single-vector expansion, restart to the current
 * Ritz vector when the subspace is full. Small problems are solved densely.
 */

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace asciprep {

/// y = A x for a symmetric A of dimension x.size().
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

struct DavidsonOptions {
  double tol = 1e-8;        ///< residual norm ||Ax - θx|| with ||x|| = 1
  int max_iter = 2000;      ///< operator applications
  int max_subspace = 25;
  int dense_threshold = 64;  ///< dimensions up to this are solved densely
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;  ///< normalized, largest-|entry| positive
  double residual = 0.0;
  int iterations = 0;
};

/**
 * Lowest eigenpair of op. guess may be empty, in which case the unit vector
 * at the smallest diagonal entry plus a small fixed-seed perturbation is used
 * (the perturbation avoids starting orthogonal to the ground state). A given
 * guess is normalized and perturbed the same way, with norm 1e-4.
 * Throws ConvergenceError carrying the best iterate when max_iter is hit.
 */
[[nodiscard]] EigenPair davidson(const LinearOperator& op, std::span<const double> diagonal,
                                 std::vector<double> guess = {},
                                 const DavidsonOptions& opts = {});

/// Flips the sign so the largest-magnitude entry (first on ties) is positive.
void fix_sign(std::span<double> v);

}  // namespace asciprep
