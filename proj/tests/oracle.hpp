// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force second-quantized reference implementations used only by tests.
// States are 64-bit occupation words over 2M spin-orbitals (α block, then β
// block); operators act by explicit Jordan–Wigner sign counting.

#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "asciprep/determinant.hpp"

namespace oracle {

using Bits = std::uint64_t;

struct Op {
  bool dagger;
  int mode;
};

/// coef * ops[0] ops[1] ... (rightmost acts first).
struct Term {
  double coef;
  std::vector<Op> ops;
};

inline int act(Bits& s, const Op& op) {
  const Bits bit = Bits{1} << op.mode;
  const bool occ = s & bit;
  if (occ == op.dagger) return 0;
  const int sign = (std::popcount(s & (bit - 1)) & 1) ? -1 : 1;
  s ^= bit;
  return sign;
}

inline std::map<Bits, double> apply(const std::vector<Term>& terms, Bits ket) {
  std::map<Bits, double> out;
  for (const auto& t : terms) {
    Bits s = ket;
    int sign = 1;
    for (auto it = t.ops.rbegin(); it != t.ops.rend() && sign != 0; ++it) sign *= act(s, *it);
    if (sign != 0) out[s] += sign * t.coef;
  }
  return out;
}

inline Bits to_bits(const asciprep::Determinant& d, int norb) {
  Bits b = 0;
  d.alpha.for_each_set([&](int p) { b |= Bits{1} << p; });
  d.beta.for_each_set([&](int p) { b |= Bits{1} << (norb + p); });
  return b;
}

inline asciprep::Determinant to_det(Bits b, int norb) {
  const Bits m = (Bits{1} << norb) - 1;
  return {asciprep::SpinString::from_mask(b & m), asciprep::SpinString::from_mask((b >> norb) & m)};
}

/// All determinants with the given counts, sorted in determinant order.
inline std::vector<asciprep::Determinant> sector(int norb, int na, int nb) {
  std::vector<asciprep::Determinant> out;
  const Bits lim = Bits{1} << norb;
  for (Bits a = 0; a < lim; ++a) {
    if (std::popcount(a) != na) continue;
    for (Bits b = 0; b < lim; ++b) {
      if (std::popcount(b) != nb) continue;
      out.push_back({asciprep::SpinString::from_mask(a), asciprep::SpinString::from_mask(b)});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Eigen::MatrixXd matrix(const std::vector<Term>& terms,
                              const std::vector<asciprep::Determinant>& basis, int norb) {
  std::map<Bits, int> idx;
  for (std::size_t i = 0; i < basis.size(); ++i) idx[to_bits(basis[i], norb)] = static_cast<int>(i);
  const int n = static_cast<int>(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (const auto& [s, v] : apply(terms, to_bits(basis[j], norb))) {
      const auto it = idx.find(s);
      if (it != idx.end()) h(it->second, j) += v;
    }
  }
  return h;
}

/// E0 + Σ h_pq a+_pσ a_qσ + ½ Σ (pq|rs) a+_pσ a+_rτ a_sτ a_qσ.
inline std::vector<Term> integral_hamiltonian(const Eigen::MatrixXd& h,
                                              const std::function<double(int, int, int, int)>& g,
                                              double e0) {
  const int m = static_cast<int>(h.rows());
  std::vector<Term> t;
  t.push_back({e0, {}});
  for (int s = 0; s < 2; ++s)
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        if (h(p, q) != 0.0) t.push_back({h(p, q), {{true, p + s * m}, {false, q + s * m}}});
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
          for (int r = 0; r < m; ++r)
            for (int u = 0; u < m; ++u) {
              const double v = g(p, q, r, u);
              if (v == 0.0) continue;
              t.push_back({0.5 * v,
                           {{true, p + s1 * m}, {true, r + s2 * m}, {false, u + s2 * m},
                            {false, q + s1 * m}}});
            }
  return t;
}

/// Real-space Hubbard: -t Σ_<ij>σ (a+_i a_j + h.c.) + U Σ n_i↑ n_i↓, each bond once.
inline std::vector<Term> hubbard_sites(int lx, int ly, double t, double u) {
  const int n = lx * ly;
  std::vector<std::pair<int, int>> bonds;
  for (int x = 0; x < lx; ++x)
    for (int y = 0; y < ly; ++y) {
      const int i = x * ly + y;
      for (int j : {((x + 1) % lx) * ly + y, x * ly + (y + 1) % ly}) {
        if (j == i) continue;
        auto b = std::minmax(i, j);
        if (std::find(bonds.begin(), bonds.end(), std::pair<int, int>(b)) == bonds.end()) {
          bonds.emplace_back(b);
        }
      }
    }
  std::vector<Term> terms;
  for (auto [i, j] : bonds)
    for (int s = 0; s < 2; ++s) {
      terms.push_back({-t, {{true, i + s * n}, {false, j + s * n}}});
      terms.push_back({-t, {{true, j + s * n}, {false, i + s * n}}});
    }
  for (int i = 0; i < n; ++i) {
    terms.push_back({u, {{true, i}, {false, i}, {true, i + n}, {false, i + n}}});
  }
  return terms;
}

/// Momentum-space Hubbard: Σ ε_k n_kσ + (U/N) Σ_{k,p,q} a+_{k+q↑} a_{k↑} a+_{p-q↓} a_{p↓}.
inline std::vector<Term> hubbard_momentum(int lx, int ly, double t, double u) {
  const int n = lx * ly;
  auto idx = [&](int kx, int ky) { return ((kx % lx + lx) % lx) * ly + ((ky % ly + ly) % ly); };
  std::vector<Term> terms;
  for (int kx = 0; kx < lx; ++kx)
    for (int ky = 0; ky < ly; ++ky) {
      const double e = -2.0 * t *
                       (std::cos(2.0 * std::numbers::pi * kx / lx) +
                        std::cos(2.0 * std::numbers::pi * ky / ly));
      for (int s = 0; s < 2; ++s) terms.push_back({e, {{true, idx(kx, ky) + s * n}, {false, idx(kx, ky) + s * n}}});
    }
  for (int kx = 0; kx < lx; ++kx)
    for (int ky = 0; ky < ly; ++ky)
      for (int px = 0; px < lx; ++px)
        for (int py = 0; py < ly; ++py)
          for (int qx = 0; qx < lx; ++qx)
            for (int qy = 0; qy < ly; ++qy) {
              terms.push_back({u / n,
                               {{true, idx(kx + qx, ky + qy)},
                                {false, idx(kx, ky)},
                                {true, idx(px - qx, py - qy) + n},
                                {false, idx(px, py) + n}}});
            }
  return terms;
}

/// Random real symmetric integrals with full 8-fold symmetry.
struct RandomIntegrals {
  Eigen::MatrixXd h;
  std::vector<double> g;  // dense [p][q][r][s]
  int m;
  double at(int p, int q, int r, int s) const { return g[((p * m + q) * m + r) * m + s]; }
};

inline RandomIntegrals random_integrals(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RandomIntegrals out{Eigen::MatrixXd(m, m), std::vector<double>(m * m * m * m), m};
  for (int p = 0; p < m; ++p)
    for (int q = 0; q <= p; ++q) out.h(p, q) = out.h(q, p) = u(rng);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) {
          const int pq = std::max(p, q) * (std::max(p, q) + 1) / 2 + std::min(p, q);
          const int rs = std::max(r, s) * (std::max(r, s) + 1) / 2 + std::min(r, s);
          if (pq < rs) continue;
          const double v = 0.5 * u(rng);
          for (auto [a, b, c, d] : {std::array{p, q, r, s}, {q, p, r, s}, {p, q, s, r}, {q, p, s, r},
                                    {r, s, p, q}, {s, r, p, q}, {r, s, q, p}, {s, r, q, p}}) {
            out.g[((a * m + b) * m + c) * m + d] = v;
          }
        }
  return out;
}

}  // namespace oracle
