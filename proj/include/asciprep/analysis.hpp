// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file analysis.hpp
 * @brief Overlaps, cumulative weights, spin-summed 1-RDM, natural orbitals,
 *        integral rotation and PT2 overlap extrapolation.
 */

#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <utility>
#include <vector>

#include "asciprep/hamiltonian.hpp"
#include "asciprep/solver.hpp"

namespace asciprep {

/// |Σ_i c_i^wf c_i^ref|^2 over shared determinants.
[[nodiscard]] double overlap_squared(const Wavefunction& wf, const Wavefunction& ref);
/// Overlap with a bare determinant (coefficient 1).
[[nodiscard]] double overlap_squared(const Wavefunction& wf, const Determinant& ref);

struct WeightPoint {
  std::size_t n = 0;
  double weight = 0.0;
};

/// Partial sums of c^2 in canonical (|c|-descending, determinant-order) order.
[[nodiscard]] std::vector<WeightPoint> cumulative_weights(const Wavefunction& wf,
                                                          std::size_t n_max);

struct OverlapReport {
  double single_det_sq = 0.0;
  std::vector<WeightPoint> cumulative;
  std::vector<Determinant> reference;
};

[[nodiscard]] OverlapReport overlap_report(const Wavefunction& wf, std::size_t n_max);
void write_overlap_report(std::ostream& out, const OverlapReport& report);

/// Spin-summed γ_pq = Σ_σ <ψ|a+_pσ a_qσ|ψ>.
struct OneRdm {
  Eigen::MatrixXd matrix;
};

[[nodiscard]] OneRdm one_rdm(const Wavefunction& wf, int norb);

struct NaturalOrbitals {
  Eigen::MatrixXd rotation;      ///< rows are natural orbitals: U γ Uᵀ = diag(occupations)
  Eigen::VectorXd occupations;   ///< descending
};

/**
 * Eigen-decomposition of γ. Each eigenvector's largest-|entry| is made
 * positive; degenerate occupations (within 1e-10) are ordered by the index of
 * the eigenvector's first nonzero entry.
 */
[[nodiscard]] NaturalOrbitals natural_orbital_rotation(const OneRdm& gamma);

/// h' = U h Uᵀ, (pq|rs)' by a four-step dense transform; e_core unchanged.
/// Throws DomainError for non-orthogonal U or plane-wave models.
[[nodiscard]] IntegralModel rotate_integrals(const IntegralModel& model, const Eigen::MatrixXd& u);

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double residual = 0.0;  ///< RMS of fit residuals
};

/// Least-squares overlap² vs e_pt2 line; intercept is the e_pt2 -> 0 estimate.
[[nodiscard]] LineFit extrapolate_overlap(const std::vector<std::pair<double, double>>& points);

/// "i j value" triplets (0-based), one per line, nonzero entries only.
void write_matrix_triplets(std::ostream& out, const Eigen::MatrixXd& m);

}  // namespace asciprep
