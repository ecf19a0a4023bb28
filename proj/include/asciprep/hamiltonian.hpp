// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file hamiltonian.hpp
 * @brief Hamiltonian matrix elements between determinants.
 *
 * Three sources share one IntegralModel surface:
 *  - dense tables read from FCIDUMP (or produced by an orbital rotation),
 *  - the spatial-basis Hubbard model (nearest-neighbour hops -t, on-site U),
 *  - the plane-wave Hubbard model (diagonal band energies, momentum-conserving U/N).
 *
 * Integrals use chemists' notation, (pq|rs) = ∫ φp* φq φr* φs, with
 *   H = Σ h_pq a+_p a_q + 1/2 Σ (pq|rs) a+_p a+_r a_s a_q  (spin-summed).
 * Plane-wave orbitals are complex, so their (pq|rs) table does not have the
 * 8-fold real symmetry; it is evaluated analytically instead of stored.
 */

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asciprep/determinant.hpp"

namespace asciprep {

enum class ModelSource { fcidump, hubbard_spatial, hubbard_planewave };

[[nodiscard]] std::string_view to_string(ModelSource s);

/// Periodic square-lattice Hubbard parameters.
struct LatticeSpec {
  int lx = 0;
  int ly = 0;
  double t = 1.0;
  double u = 0.0;
  int n_alpha = 0;
  int n_beta = 0;
  bool periodic = true;

  [[nodiscard]] int sites() const { return lx * ly; }
  /// Site / plane-wave orbital index for lattice coordinate (x, y).
  [[nodiscard]] int index(int x, int y) const { return x * ly + y; }
  void validate() const;
};

/// Lattice momentum (2π kx / Lx, 2π ky / Ly) stored as integers reduced mod (Lx, Ly).
struct MomentumLabel {
  int kx = 0;
  int ky = 0;
  friend bool operator==(const MomentumLabel&, const MomentumLabel&) = default;
  friend auto operator<=>(const MomentumLabel&, const MomentumLabel&) = default;
};

[[nodiscard]] MomentumLabel add(const MomentumLabel& a, const MomentumLabel& b,
                                const LatticeSpec& spec);
[[nodiscard]] MomentumLabel negate(const MomentumLabel& a, const LatticeSpec& spec);

/// Packed storage for real 8-fold symmetric (pq|rs).
class TwoBodyTable {
 public:
  TwoBodyTable() = default;
  explicit TwoBodyTable(int norb);

  [[nodiscard]] int norb() const { return norb_; }
  [[nodiscard]] double get(int p, int q, int r, int s) const { return data_[index(p, q, r, s)]; }
  void set(int p, int q, int r, int s, double v) { data_[index(p, q, r, s)] = v; }
  [[nodiscard]] std::size_t index(int p, int q, int r, int s) const {
    const std::size_t pq = pair(p, q);
    const std::size_t rs = pair(r, s);
    return pq >= rs ? pq * (pq + 1) / 2 + rs : rs * (rs + 1) / 2 + pq;
  }
  [[nodiscard]] const std::vector<double>& data() const { return data_; }

  friend bool operator==(const TwoBodyTable&, const TwoBodyTable&) = default;

 private:
  static std::size_t pair(int p, int q) {
    const auto a = static_cast<std::size_t>(std::max(p, q));
    const auto b = static_cast<std::size_t>(std::min(p, q));
    return a * (a + 1) / 2 + b;
  }
  int norb_ = 0;
  std::vector<double> data_;
};

class IntegralModel {
 public:
  /// Dense-table model; h must be symmetric.
  IntegralModel(Eigen::MatrixXd h, TwoBodyTable g, double e_core, int n_alpha, int n_beta);

  [[nodiscard]] static IntegralModel hubbard_spatial(const LatticeSpec& spec);
  [[nodiscard]] static IntegralModel hubbard_planewave(const LatticeSpec& spec);

  [[nodiscard]] int norb() const { return norb_; }
  [[nodiscard]] ModelSource source() const { return source_; }
  [[nodiscard]] double e_core() const { return e_core_; }
  [[nodiscard]] const std::optional<LatticeSpec>& lattice() const { return lattice_; }
  /// Electron counts stated by the source (FCIDUMP header or lattice spec).
  [[nodiscard]] int n_alpha() const { return n_alpha_; }
  [[nodiscard]] int n_beta() const { return n_beta_; }
  /// FCIDUMP-backed and spatial-Hubbard models can produce dense tables.
  [[nodiscard]] bool dense_capable() const { return source_ != ModelSource::hubbard_planewave; }

  [[nodiscard]] double one_body(int p, int q) const;
  [[nodiscard]] double two_body(int p, int q, int r, int s) const;
  [[nodiscard]] Eigen::MatrixXd one_body_matrix() const;
  /// Dense 8-fold table; DomainError for plane-wave models.
  [[nodiscard]] TwoBodyTable two_body_table() const;

  /// Momentum label of plane-wave orbital p (DomainError for other sources).
  [[nodiscard]] MomentumLabel momentum(int p) const;
  /// Plane-wave orbital with the given momentum.
  [[nodiscard]] int orbital_of(const MomentumLabel& k) const;

  /// <d|H|d>, including e_core.
  [[nodiscard]] double diagonal(const Determinant& d) const;

  /// <bra|H|ket> for an excitation of degree 1 or 2 from ket (phase included).
  [[nodiscard]] double off_diagonal(const Determinant& ket, const Excitation& exc) const;

  /// Generic Slater–Condon evaluation from one_body/two_body, any source.
  [[nodiscard]] double slater_condon(const Determinant& bra, const Determinant& ket) const;

  /**
   * Calls f(bra, value) for every determinant bra with <bra|H|ket> possibly
   * nonzero, bra != ket. Order is deterministic. Hubbard sources enumerate
   * only their hop/scattering moves.
   */
  template <typename F>
  void for_each_connection(const Determinant& ket, F&& f) const;

 private:
  IntegralModel() = default;

  double sc_diagonal(const Determinant& d) const;
  double sc_off_diagonal(const Determinant& ket, const Excitation& exc) const;

  template <typename F>
  void spatial_connections(const Determinant& ket, F& f) const;
  template <typename F>
  void planewave_connections(const Determinant& ket, F& f) const;

  int norb_ = 0;
  ModelSource source_ = ModelSource::fcidump;
  double e_core_ = 0.0;
  int n_alpha_ = 0;
  int n_beta_ = 0;
  std::optional<LatticeSpec> lattice_;

  Eigen::MatrixXd h_;
  TwoBodyTable g_;

  // Hubbard data.
  std::vector<std::vector<int>> neighbors_;  // spatial: sorted, merged
  std::vector<double> band_;                 // plane-wave ε(k)
  std::vector<MomentumLabel> k_of_;          // plane-wave orbital -> momentum
  double u_over_n_ = 0.0;
};

/// <a|H|b> with dimension and particle-number checks.
[[nodiscard]] double matrix_element(const IntegralModel& m, const Determinant& a,
                                    const Determinant& b);

[[nodiscard]] IntegralModel build_hubbard_spatial(const LatticeSpec& spec);
[[nodiscard]] IntegralModel build_hubbard_planewave(const LatticeSpec& spec);

/// Sum of occupied plane-wave momenta (both spins), reduced mod lattice.
[[nodiscard]] MomentumLabel total_momentum(const Determinant& d, const LatticeSpec& spec);

enum class PatternKind { aufbau, afm, sdw, user };

[[nodiscard]] PatternKind parse_pattern_kind(std::string_view s);

/**
 * Initial determinant for a run.
 *
 * aufbau: lowest diagonal one-body energies, ties by orbital index. With a
 *   sector given, the open shell is filled by the lowest-energy combination
 *   whose total momentum matches the sector (ties by determinant order).
 * afm: ↑ on sites with x+y even, ↓ on x+y odd (half filling, bipartite).
 * sdw: ↑ fills even columns x, ↓ fills odd columns (half filling, even Lx).
 * user: parsed from user_text.
 */
[[nodiscard]] Determinant pattern_determinant(PatternKind kind, const IntegralModel& model,
                                              int n_alpha, int n_beta,
                                              const std::optional<MomentumLabel>& sector = {},
                                              std::string_view user_text = {});

// ---------------------------------------------------------------------------

template <typename F>
void IntegralModel::spatial_connections(const Determinant& ket, F& f) const {
  const double minus_t = -lattice_->t;
  for (Spin s : {Spin::alpha, Spin::beta}) {
    const SpinString& occ = ket.spin(s);
    occ.for_each_set([&](int i) {
      for (int j : neighbors_[i]) {
        if (occ.test(j)) continue;
        Determinant bra = ket;
        SpinString& so = bra.spin(s);
        so.reset(i);
        so.set(j);
        f(static_cast<const Determinant&>(bra), minus_t * single_phase(occ, i, j));
      }
    });
  }
}

template <typename F>
void IntegralModel::planewave_connections(const Determinant& ket, F& f) const {
  const LatticeSpec& spec = *lattice_;
  ket.alpha.for_each_set([&](int i) {
    for (int a = 0; a < norb_; ++a) {
      if (ket.alpha.test(a)) continue;
      // q = k_a - k_i transferred from the β electron.
      const int qx = k_of_[a].kx - k_of_[i].kx;
      const int qy = k_of_[a].ky - k_of_[i].ky;
      const int pa = single_phase(ket.alpha, i, a);
      ket.beta.for_each_set([&](int j) {
        const int bx = ((k_of_[j].kx - qx) % spec.lx + spec.lx) % spec.lx;
        const int by = ((k_of_[j].ky - qy) % spec.ly + spec.ly) % spec.ly;
        const int b = spec.index(bx, by);
        if (ket.beta.test(b)) return;
        Determinant bra = ket;
        bra.alpha.reset(i);
        bra.alpha.set(a);
        bra.beta.reset(j);
        bra.beta.set(b);
        f(static_cast<const Determinant&>(bra), u_over_n_ * pa * single_phase(ket.beta, j, b));
      });
    }
  });
}

template <typename F>
void IntegralModel::for_each_connection(const Determinant& ket, F&& f) const {
  switch (source_) {
    case ModelSource::hubbard_spatial:
      spatial_connections(ket, f);
      return;
    case ModelSource::hubbard_planewave:
      planewave_connections(ket, f);
      return;
    case ModelSource::fcidump:
      for_each_connected(ket, norb_, [&](const Determinant& bra, const Excitation& exc) {
        const double v = sc_off_diagonal(ket, exc);
        if (v != 0.0) f(bra, v);
      });
      return;
  }
}

}  // namespace asciprep
