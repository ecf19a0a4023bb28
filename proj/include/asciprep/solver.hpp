// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file solver.hpp
 * @brief Ground-state machinery: projected Hamiltonians, exact
 *        diagonalization, ASCI selection and Epstein–Nesbet PT2.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "asciprep/davidson.hpp"
#include "asciprep/determinant.hpp"
#include "asciprep/hamiltonian.hpp"

namespace asciprep {

/// Σ c_i |D_i>, normalized, sorted by descending |c| (ties by determinant order).
struct Wavefunction {
  std::vector<Determinant> dets;
  std::vector<double> coeffs;
  double energy = 0.0;

  [[nodiscard]] std::size_t size() const { return dets.size(); }
  /// Sorts into canonical order; throws DomainError on duplicates.
  void canonicalize();
  void normalize();
  /// Weight of the largest-|c| determinant.
  [[nodiscard]] double top_weight() const;
  /// First n entries, renormalized.
  [[nodiscard]] Wavefunction truncated(std::size_t n) const;
};

using DeterminantIndex = std::unordered_map<Determinant, std::uint32_t, DeterminantHash>;

[[nodiscard]] DeterminantIndex index_of(std::span<const Determinant> dets);

/// H projected onto a determinant list, stored as diagonal + CSR off-diagonal.
class SpaceHamiltonian {
 public:
  SpaceHamiltonian(const IntegralModel& model, std::span<const Determinant> space);

  [[nodiscard]] std::size_t dim() const { return diag_.size(); }
  [[nodiscard]] const std::vector<double>& diagonal() const { return diag_; }
  [[nodiscard]] std::size_t nonzeros() const { return cols_.size(); }
  void apply(std::span<const double> x, std::span<double> y) const;
  [[nodiscard]] LinearOperator as_operator() const;

 private:
  std::vector<double> diag_;
  std::vector<std::uint64_t> row_ptr_;
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
};

/// Lowest eigenpair of H on space; coefficients aligned with space.
[[nodiscard]] EigenPair davidson_ground_state(const IntegralModel& model,
                                              std::span<const Determinant> space,
                                              double tol = 1e-8,
                                              std::vector<double> guess = {});

/// Particle numbers and optional plane-wave momentum sector.
struct SectorSpec {
  int n_alpha = 0;
  int n_beta = 0;
  std::optional<MomentumLabel> momentum;
};

inline constexpr std::size_t kDefaultSpaceCap = 20'000'000;

/// Number of determinants in the sector (exact).
[[nodiscard]] std::size_t sector_size(const IntegralModel& model, const SectorSpec& sector,
                                      std::size_t cap = kDefaultSpaceCap);

/// All determinants of the sector in ascending determinant order.
/// Throws SizeGuardError (carrying the required size) beyond cap.
[[nodiscard]] std::vector<Determinant> enumerate_space(const IntegralModel& model,
                                                       const SectorSpec& sector,
                                                       std::size_t cap = kDefaultSpaceCap);

struct ExactResult {
  double energy = 0.0;
  Wavefunction wavefunction;
  std::size_t space_size = 0;
};

[[nodiscard]] ExactResult exact_diagonalize(const IntegralModel& model, const SectorSpec& sector,
                                            double tol = 1e-10,
                                            std::size_t cap = kDefaultSpaceCap);

/// E - H_ii, replaced by ±1e-8 (sign kept, + for zero) when smaller in magnitude.
[[nodiscard]] double regularized_denominator(double e, double hii);

struct ScoredDeterminant {
  Determinant det;
  double score = 0.0;      ///< |Σ_j H_ij C_j / (E - H_ii)|
  double estimate = 0.0;   ///< signed Σ_j H_ij C_j / (E - H_ii)
};

/**
 * Candidates connected to core and absent from exclude (core itself is always
 * excluded), with contributions of all core parents summed before dividing.
 * Sorted by descending score, ties by determinant order. When sector is set,
 * candidates outside it are dropped.
 */
[[nodiscard]] std::vector<ScoredDeterminant> rank_candidates(
    const IntegralModel& model, const Wavefunction& core, double energy,
    const DeterminantIndex* exclude = nullptr,
    const std::optional<MomentumLabel>& sector = std::nullopt);

/// Epstein–Nesbet: Σ_{i ∉ wf} (Σ_j H_ij C_j)^2 / (E - H_ii).
[[nodiscard]] double pt2_correction(const IntegralModel& model, const Wavefunction& wf,
                                    double energy);

struct AsciConfig {
  std::size_t tdets = 1000;
  std::size_t cdets = 0;  ///< 0 selects min(tdets, max(1000, tdets / 10))
  double energy_tol = 1e-8;
  int max_iter = 50;
  double davidson_tol = 1e-8;
  std::optional<MomentumLabel> sector;
  bool pt2_each_iteration = false;

  [[nodiscard]] std::size_t core_size() const;
  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  std::size_t space_size = 0;
  double e_var = 0.0;
  double e_pt2 = 0.0;  ///< NaN unless computed for this iteration
  double top_weight = 0.0;
};

struct AsciResult {
  Wavefunction final;
  double e_var = 0.0;
  double e_pt2 = 0.0;
  std::vector<IterationRecord> iterations;
  bool converged = false;
};

/**
 * Selected-CI iteration: diagonalize, expand from the top cdets, keep the top
 * tdets of (current |C| ∪ candidate scores), repeat. Stops when the space no
 * longer changes, when |ΔE| < energy_tol once the space holds tdets
 * determinants, when a new space would raise the energy by more than
 * davidson_tol (the previous space is kept), or at max_iter.
 */
[[nodiscard]] AsciResult asci_run(const IntegralModel& model,
                                  const std::vector<Determinant>& initial,
                                  const AsciConfig& cfg);

/// "iter space_size e_var e_pt2 top_weight" records, one per line, with a header.
void write_iteration_log(std::ostream& out, const std::vector<IterationRecord>& log);

}  // namespace asciprep
