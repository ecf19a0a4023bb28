// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file determinant.hpp
 * @brief Slater determinants as α/β occupation bit-strings.
 *
 * Spin-orbital ordering used everywhere (phases, qubit mapping, excitation
 * records): α orbitals 0..M-1 first, then β orbitals M..2M-1. The fermionic
 * sign of a single move h -> p is (-1)^(occupied spin-orbitals strictly
 * between h and p).
 */

#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace asciprep {

inline constexpr int kMaxOrbitals = 256;

/// Fixed-capacity occupation string for one spin species (bit p = orbital p).
class SpinString {
 public:
  static constexpr int kWords = kMaxOrbitals / 64;

  constexpr SpinString() = default;

  /// From a list of occupied orbital indices; throws DomainError when out of range.
  static SpinString from_orbitals(const std::vector<int>& occupied);
  /// Low 64 orbitals from a plain integer mask.
  static constexpr SpinString from_mask(std::uint64_t mask) {
    SpinString s;
    s.words_[0] = mask;
    return s;
  }

  [[nodiscard]] constexpr bool test(int p) const {
    return (words_[p >> 6] >> (p & 63)) & 1u;
  }
  constexpr void set(int p) { words_[p >> 6] |= std::uint64_t{1} << (p & 63); }
  constexpr void reset(int p) { words_[p >> 6] &= ~(std::uint64_t{1} << (p & 63)); }
  constexpr void flip(int p) { words_[p >> 6] ^= std::uint64_t{1} << (p & 63); }

  [[nodiscard]] constexpr int count() const {
    int n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
  }

  /// Number of set bits with index strictly between lo and hi (order-insensitive).
  [[nodiscard]] int count_between(int a, int b) const;
  /// Number of set bits with index < p.
  [[nodiscard]] int count_below(int p) const;

  /// Highest set bit, or -1 when empty.
  [[nodiscard]] int highest() const;

  [[nodiscard]] std::vector<int> orbitals() const;

  template <typename F>
  void for_each_set(F&& f) const {
    for (int w = 0; w < kWords; ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        f(w * 64 + std::countr_zero(bits));
        bits &= bits - 1;
      }
    }
  }

  [[nodiscard]] constexpr std::uint64_t word(int i) const { return words_[i]; }

  friend constexpr SpinString operator^(SpinString a, const SpinString& b) {
    for (int i = 0; i < kWords; ++i) a.words_[i] ^= b.words_[i];
    return a;
  }
  friend constexpr SpinString operator&(SpinString a, const SpinString& b) {
    for (int i = 0; i < kWords; ++i) a.words_[i] &= b.words_[i];
    return a;
  }
  friend constexpr SpinString operator|(SpinString a, const SpinString& b) {
    for (int i = 0; i < kWords; ++i) a.words_[i] |= b.words_[i];
    return a;
  }
  /// a & ~b
  [[nodiscard]] constexpr SpinString minus(const SpinString& b) const {
    SpinString r = *this;
    for (int i = 0; i < kWords; ++i) r.words_[i] &= ~b.words_[i];
    return r;
  }

  friend constexpr bool operator==(const SpinString&, const SpinString&) = default;
  /// Ordered as an unsigned 256-bit integer.
  friend constexpr std::strong_ordering operator<=>(const SpinString& a, const SpinString& b) {
    for (int i = kWords - 1; i >= 0; --i) {
      if (a.words_[i] != b.words_[i]) return a.words_[i] <=> b.words_[i];
    }
    return std::strong_ordering::equal;
  }

 private:
  std::array<std::uint64_t, kWords> words_{};
};

enum class Spin : std::uint8_t { alpha = 0, beta = 1 };

/// Slater determinant; equality and ordering are on (alpha, beta).
struct Determinant {
  SpinString alpha;
  SpinString beta;

  [[nodiscard]] const SpinString& spin(Spin s) const { return s == Spin::alpha ? alpha : beta; }
  [[nodiscard]] SpinString& spin(Spin s) { return s == Spin::alpha ? alpha : beta; }

  [[nodiscard]] int n_alpha() const { return alpha.count(); }
  [[nodiscard]] int n_beta() const { return beta.count(); }

  /// Occupation of spin-orbital q in the α-then-β ordering.
  [[nodiscard]] bool occupied(int q, int norb) const {
    return q < norb ? alpha.test(q) : beta.test(q - norb);
  }

  static Determinant from_orbitals(const std::vector<int>& alpha_occ,
                                   const std::vector<int>& beta_occ);

  friend bool operator==(const Determinant&, const Determinant&) = default;
  friend std::strong_ordering operator<=>(const Determinant& a, const Determinant& b) {
    if (auto c = a.alpha <=> b.alpha; c != 0) return c;
    return a.beta <=> b.beta;
  }
};

struct DeterminantHash {
  std::size_t operator()(const Determinant& d) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    auto mix = [&h](std::uint64_t w) {
      h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdULL;
      h ^= h >> 33;
    };
    for (int i = 0; i < SpinString::kWords; ++i) mix(d.alpha.word(i));
    for (int i = 0; i < SpinString::kWords; ++i) mix(d.beta.word(i));
    return static_cast<std::size_t>(h);
  }
};

/// One annihilated or created spin-orbital.
struct SpinOrbital {
  Spin spin;
  int orbital;

  /// Position in the α-then-β ordering.
  [[nodiscard]] int index(int norb) const { return spin == Spin::alpha ? orbital : norb + orbital; }
  friend bool operator==(const SpinOrbital&, const SpinOrbital&) = default;
};

/**
 * Excitation ket -> bra, degree 0..2.
 *
 * holes and particles are each ascending in spin-orbital order. The phase is
 * the sign s with |bra> = s * a+_{p1} a+_{p2} a_{h2} a_{h1} |ket> (degree 2),
 * s * a+_p a_h |ket> (degree 1), and +1 for degree 0.
 */
struct Excitation {
  int degree = 0;
  std::array<SpinOrbital, 2> holes{};
  std::array<SpinOrbital, 2> particles{};
  int phase = 1;
};

/// (popcount(Δα) + popcount(Δβ)) / 2. Throws DomainError on differing particle numbers.
[[nodiscard]] int excitation_degree(const Determinant& a, const Determinant& b);

/// popcount over the concatenated α and β difference strings.
[[nodiscard]] int spin_orbital_hamming(const Determinant& a, const Determinant& b);

/// Phase of exc applied to ket (see Excitation). Throws DomainError when the
/// excitation annihilates an empty or creates an occupied spin-orbital.
[[nodiscard]] int excitation_phase(const Determinant& ket, const Excitation& exc);

/// Applies exc to ket (occupations only; phase is not stored on determinants).
[[nodiscard]] Determinant apply_excitation(const Determinant& ket, const Excitation& exc);

/// Excitation that maps ket to bra, with phase; nullopt when degree > 2.
[[nodiscard]] std::optional<Excitation> find_excitation(const Determinant& bra,
                                                        const Determinant& ket);

/// Phase of a single move h -> p within one spin string.
[[nodiscard]] inline int single_phase(const SpinString& s, int h, int p) {
  return (s.count_between(h, p) & 1) ? -1 : 1;
}

/// Allowed particle destinations for connected_excitations.
struct OrbitalFilter {
  SpinString alpha;
  SpinString beta;
};

/**
 * Calls visit(Determinant, Excitation) for every determinant one or two
 * spin-orbital moves away from d, each exactly once, in ascending
 * (degree, holes, particles) order. Spin projection is conserved.
 */
void for_each_connected(const Determinant& d, int norb,
                        const std::function<void(const Determinant&, const Excitation&)>& visit,
                        const std::optional<OrbitalFilter>& filter = std::nullopt);

/// Materialized form of for_each_connected.
[[nodiscard]] std::vector<std::pair<Determinant, Excitation>> connected_excitations(
    const Determinant& d, int norb, const std::optional<OrbitalFilter>& filter = std::nullopt);

/// "α:0,3|β:1" rendering.
[[nodiscard]] std::string to_string(const Determinant& d);
/// Inverse of to_string; also accepts "a:"/"b:" prefixes. Throws ParseError.
[[nodiscard]] Determinant parse_determinant(std::string_view text);

/// Throws DomainError when any occupied orbital is >= norb.
void check_within(const Determinant& d, int norb);

}  // namespace asciprep
