// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file stateprep.hpp
 * @brief Multi-determinant state preparation with one auxiliary qubit.
 *
 * Target: Σ_l α_l |D_l> over n system qubits (qubit q = spin-orbital q in the
 * α-then-β ordering, occupation-number encoding). Starting from
 * |D_1>|1>_aux, each step l
 *   1. rotates pivot qubit k_l, controlled by aux, splitting the aux=1 branch
 *      into α_l|D_l> + β_{l+1} X_k|D_l>,
 *   2. flips aux on the |D_l> branch with an MCX keyed on all n bits of D_l,
 *   3. applies aux-controlled X on the other qubits where D_l and D_{l+1} differ,
 * and a final MCX keyed on D_L returns aux to |0>.
 *
 * Basis index convention for simulation: bit q of the index is qubit q; the
 * auxiliary qubit is qubit n.
 */

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "asciprep/determinant.hpp"
#include "asciprep/solver.hpp"

namespace asciprep {

/// Computational basis state of up to 2*kMaxOrbitals + 1 qubits.
class QubitPattern {
 public:
  static constexpr int kWords = (2 * kMaxOrbitals + 1 + 63) / 64;

  QubitPattern() = default;
  explicit QubitPattern(int n);
  /// Occupation string of d on 2*norb qubits.
  static QubitPattern from_determinant(const Determinant& d, int norb);
  /// Low qubits from an integer mask (n <= 64).
  static QubitPattern from_mask(int n, std::uint64_t mask);

  [[nodiscard]] int size() const { return n_; }
  [[nodiscard]] bool test(int q) const { return (words_[q >> 6] >> (q & 63)) & 1u; }
  void set(int q, bool v) {
    const std::uint64_t bit = std::uint64_t{1} << (q & 63);
    if (v) {
      words_[q >> 6] |= bit;
    } else {
      words_[q >> 6] &= ~bit;
    }
  }
  void flip(int q) { words_[q >> 6] ^= std::uint64_t{1} << (q & 63); }
  [[nodiscard]] int count() const;
  /// Same pattern widened to n qubits (new qubits |0>).
  [[nodiscard]] QubitPattern widened(int n) const;
  /// Basis index; requires size() <= 63.
  [[nodiscard]] std::uint64_t index() const;
  [[nodiscard]] std::uint64_t word(int i) const { return words_[i]; }

  friend bool operator==(const QubitPattern&, const QubitPattern&) = default;
  /// Unsigned-integer order (qubit n-1 most significant), then width.
  friend std::strong_ordering operator<=>(const QubitPattern& a, const QubitPattern& b) {
    for (int i = kWords - 1; i >= 0; --i) {
      if (a.words_[i] != b.words_[i]) return a.words_[i] <=> b.words_[i];
    }
    return a.n_ <=> b.n_;
  }

 private:
  int n_ = 0;
  std::array<std::uint64_t, kWords> words_{};
};

[[nodiscard]] int hamming(const QubitPattern& a, const QubitPattern& b);

struct Control {
  int qubit = 0;
  bool on_one = true;  ///< false: control on |0>
  friend bool operator==(const Control&, const Control&) = default;
};

enum class GateKind { X, MCX, CRY };

struct Gate {
  GateKind kind = GateKind::X;
  int target = 0;
  std::vector<Control> controls;  ///< X: none; CRY: exactly the aux qubit
  double angle = 0.0;             ///< CRY only, radians; RY(θ) = exp(-iθY/2)
  friend bool operator==(const Gate&, const Gate&) = default;
};

struct Circuit {
  int n_system = 0;
  bool uses_aux = false;
  std::vector<Gate> gates;

  [[nodiscard]] int n_qubits() const { return n_system + (uses_aux ? 1 : 0); }
  [[nodiscard]] int aux() const { return n_system; }
  friend bool operator==(const Circuit&, const Circuit&) = default;
};

struct PrepPlan {
  int n_system = 0;
  std::vector<QubitPattern> dets;   ///< D_1..D_L in preparation order
  std::vector<double> amplitudes;   ///< α_1..α_L, Σα² = 1
  std::vector<int> pivots;          ///< k_l for l = 1..L-1
  std::vector<double> angles;       ///< θ_l = 2 atan2(β_{l+1}, α_l), l = 1..L-1
};

/**
 * Greedy nearest-neighbour path: start at the largest |coeff| (ties by pattern
 * order), then repeatedly take the unvisited pattern at minimal Hamming
 * distance (ties by pattern order). Returns the visiting permutation.
 */
[[nodiscard]] std::vector<std::size_t> order_determinants(const std::vector<QubitPattern>& dets,
                                                          const std::vector<double>& coeffs);

/// Sum of Hamming distances between consecutive patterns.
[[nodiscard]] int path_length(const std::vector<QubitPattern>& dets);

/**
 * Builds the plan for the given order. Amplitudes must be normalized within
 * 1e-12. The pivot is the lowest qubit where D_l and D_{l+1} differ. Tail
 * norms β_l are taken >= 0 except the last, β_L = α_L, which carries the sign
 * of the final amplitude. Throws DomainError on duplicates, bad norms, or a
 * vanishing tail (β_l < 1e-12 before the last step).
 */
[[nodiscard]] PrepPlan make_plan(int n_system, std::vector<QubitPattern> dets,
                                 std::vector<double> amplitudes);

/// Orders, renormalizes and plans a wavefunction (qubit q = spin-orbital q).
[[nodiscard]] PrepPlan plan_from_wavefunction(const Wavefunction& wf, int norb,
                                              bool hamming_order = true);

[[nodiscard]] Circuit synthesize(const PrepPlan& plan);

struct GateCounts {
  std::size_t x = 0;
  std::size_t mcx = 0;
  std::size_t cry = 0;
  std::size_t total = 0;
  std::size_t erasures = 0;  ///< MCX gates targeting the auxiliary qubit
  std::size_t fanout = 0;    ///< MCX gates whose only control is the auxiliary qubit
  std::map<std::size_t, std::size_t> control_histogram;  ///< #controls -> #gates (MCX and CRY)
};

[[nodiscard]] GateCounts gate_counts(const Circuit& c);

inline constexpr int kMaxDenseQubits = 24;

/// Dense real amplitudes (all gates are real), dimension 2^n_qubits.
/// Throws SizeGuardError (required bytes) beyond kMaxDenseQubits.
[[nodiscard]] std::vector<double> simulate(const Circuit& c);

/// As simulate, calling after_gate(index, state) after each gate.
using GateObserver = std::function<void(std::size_t, std::span<const double>)>;
[[nodiscard]] std::vector<double> simulate(const Circuit& c, const GateObserver& after_gate);

/// Exact simulation over the nonzero support only; any width.
[[nodiscard]] std::map<QubitPattern, double> simulate_sparse(const Circuit& c);

/// |<target|state>|^2 with target determinants mapped to qubits, aux = |0>.
[[nodiscard]] double fidelity(std::span<const double> state, const Wavefunction& target, int norb);
[[nodiscard]] double fidelity(const std::map<QubitPattern, double>& state,
                              const Wavefunction& target, int norb);

/// Largest |amplitude| on basis states with the auxiliary qubit set.
[[nodiscard]] double aux_leakage(std::span<const double> state, const Circuit& c);

void write_circuit(std::ostream& out, const Circuit& c);
[[nodiscard]] std::string to_text(const Circuit& c);
/// Inverse of write_circuit; blank and "#" lines are skipped. Throws ParseError
/// with line numbers.
[[nodiscard]] Circuit parse_circuit(std::istream& in);

}  // namespace asciprep
