// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "asciprep/determinant.hpp"

#include <algorithm>
#include <charconv>

#include "asciprep/errors.hpp"

namespace asciprep {

SpinString SpinString::from_orbitals(const std::vector<int>& occupied) {
  SpinString s;
  for (int p : occupied) {
    if (p < 0 || p >= kMaxOrbitals) {
      throw DomainError("orbital index " + std::to_string(p) + " outside [0, " +
                        std::to_string(kMaxOrbitals) + ")");
    }
    s.set(p);
  }
  return s;
}

int SpinString::count_below(int p) const {
  int n = 0;
  const int full = p >> 6;
  for (int w = 0; w < full; ++w) n += std::popcount(words_[w]);
  if (full < kWords && (p & 63)) {
    n += std::popcount(words_[full] & ((std::uint64_t{1} << (p & 63)) - 1));
  }
  return n;
}

int SpinString::count_between(int a, int b) const {
  if (a > b) std::swap(a, b);
  if (b - a < 2) return 0;
  return count_below(b) - count_below(a + 1);
}

int SpinString::highest() const {
  for (int w = kWords - 1; w >= 0; --w) {
    if (words_[w]) return w * 64 + 63 - std::countl_zero(words_[w]);
  }
  return -1;
}

std::vector<int> SpinString::orbitals() const {
  std::vector<int> out;
  for_each_set([&out](int p) { out.push_back(p); });
  return out;
}

Determinant Determinant::from_orbitals(const std::vector<int>& alpha_occ,
                                       const std::vector<int>& beta_occ) {
  return {SpinString::from_orbitals(alpha_occ), SpinString::from_orbitals(beta_occ)};
}

int excitation_degree(const Determinant& a, const Determinant& b) {
  if (a.n_alpha() != b.n_alpha() || a.n_beta() != b.n_beta()) {
    throw DomainError("excitation_degree: particle numbers differ");
  }
  return ((a.alpha ^ b.alpha).count() + (a.beta ^ b.beta).count()) / 2;
}

int spin_orbital_hamming(const Determinant& a, const Determinant& b) {
  return (a.alpha ^ b.alpha).count() + (a.beta ^ b.beta).count();
}

namespace {

// Applies a+_p a_h in place and returns its sign.
int move_electron(Determinant& d, const SpinOrbital& h, const SpinOrbital& p) {
  if (h.spin != p.spin) throw DomainError("excitation changes spin");
  SpinString& s = d.spin(h.spin);
  if (!s.test(h.orbital)) throw DomainError("excitation annihilates an empty orbital");
  if (h.orbital != p.orbital && s.test(p.orbital)) {
    throw DomainError("excitation creates an occupied orbital");
  }
  const int sign = single_phase(s, h.orbital, p.orbital);
  s.reset(h.orbital);
  s.set(p.orbital);
  return sign;
}

// Pairs each hole with the particle of the same spin, preserving the
// a+_{p1} a+_{p2} a_{h2} a_{h1} reading: for mixed-spin doubles the α hole
// goes with the α particle, which is also position 0 of each ascending pair.
Determinant apply_with_phase(const Determinant& ket, const Excitation& exc, int& phase) {
  Determinant d = ket;
  phase = 1;
  if (exc.degree == 0) return d;
  if (exc.degree == 1) {
    phase = move_electron(d, exc.holes[0], exc.particles[0]);
    return d;
  }
  if (exc.degree != 2) throw DomainError("excitation degree must be 0, 1 or 2");
  const auto& h = exc.holes;
  const auto& p = exc.particles;
  if (h[0].spin != p[0].spin || h[1].spin != p[1].spin) {
    throw DomainError("excitation changes spin");
  }
  if (h[0] == h[1] || p[0] == p[1]) throw DomainError("repeated spin-orbital in excitation");
  // Validate against the original ket before moving anything.
  for (const auto& x : h) {
    if (!ket.spin(x.spin).test(x.orbital)) {
      throw DomainError("excitation annihilates an empty orbital");
    }
  }
  for (const auto& x : p) {
    const bool is_hole = (x == h[0]) || (x == h[1]);
    if (!is_hole && ket.spin(x.spin).test(x.orbital)) {
      throw DomainError("excitation creates an occupied orbital");
    }
  }
  // a+_{p1} a+_{p2} a_{h2} a_{h1} = (a+_{p2} a_{h2}) (a+_{p1} a_{h1}) for distinct indices.
  phase = move_electron(d, h[0], p[0]);
  phase *= move_electron(d, h[1], p[1]);
  return d;
}

}  // namespace

int excitation_phase(const Determinant& ket, const Excitation& exc) {
  int phase = 1;
  (void)apply_with_phase(ket, exc, phase);
  return phase;
}

Determinant apply_excitation(const Determinant& ket, const Excitation& exc) {
  int phase = 1;
  return apply_with_phase(ket, exc, phase);
}

std::optional<Excitation> find_excitation(const Determinant& bra, const Determinant& ket) {
  const SpinString ha = ket.alpha.minus(bra.alpha);
  const SpinString hb = ket.beta.minus(bra.beta);
  const SpinString pa = bra.alpha.minus(ket.alpha);
  const SpinString pb = bra.beta.minus(ket.beta);
  const int na = ha.count();
  const int nb = hb.count();
  if (na != pa.count() || nb != pb.count() || na + nb > 2) return std::nullopt;

  Excitation exc;
  exc.degree = na + nb;
  int k = 0;
  ha.for_each_set([&](int q) { exc.holes[k++] = {Spin::alpha, q}; });
  hb.for_each_set([&](int q) { exc.holes[k++] = {Spin::beta, q}; });
  k = 0;
  pa.for_each_set([&](int q) { exc.particles[k++] = {Spin::alpha, q}; });
  pb.for_each_set([&](int q) { exc.particles[k++] = {Spin::beta, q}; });
  exc.phase = excitation_phase(ket, exc);
  return exc;
}

void for_each_connected(const Determinant& d, int norb,
                        const std::function<void(const Determinant&, const Excitation&)>& visit,
                        const std::optional<OrbitalFilter>& filter) {
  // Work in the flat α-then-β spin-orbital index space.
  std::vector<int> occ;
  std::vector<int> virt;
  for (int q = 0; q < 2 * norb; ++q) {
    if (d.occupied(q, norb)) {
      occ.push_back(q);
    } else {
      const bool allowed = !filter || (q < norb ? filter->alpha.test(q) : filter->beta.test(q - norb));
      if (allowed) virt.push_back(q);
    }
  }
  auto as_so = [norb](int q) {
    return q < norb ? SpinOrbital{Spin::alpha, q} : SpinOrbital{Spin::beta, q - norb};
  };
  auto spin_of = [norb](int q) { return q < norb ? 0 : 1; };

  Excitation exc;
  exc.degree = 1;
  for (int h : occ) {
    for (int p : virt) {
      if (spin_of(h) != spin_of(p)) continue;
      exc.holes[0] = as_so(h);
      exc.particles[0] = as_so(p);
      int phase = 1;
      const Determinant out = apply_with_phase(d, exc, phase);
      exc.phase = phase;
      visit(out, exc);
    }
  }

  exc.degree = 2;
  for (std::size_t i = 0; i < occ.size(); ++i) {
    for (std::size_t j = i + 1; j < occ.size(); ++j) {
      const int hs = spin_of(occ[i]) + spin_of(occ[j]);
      for (std::size_t a = 0; a < virt.size(); ++a) {
        for (std::size_t b = a + 1; b < virt.size(); ++b) {
          if (spin_of(virt[a]) + spin_of(virt[b]) != hs) continue;
          // Mixed-spin: ascending order puts α first in both pairs.
          if (spin_of(occ[i]) != spin_of(virt[a])) continue;
          exc.holes = {as_so(occ[i]), as_so(occ[j])};
          exc.particles = {as_so(virt[a]), as_so(virt[b])};
          int phase = 1;
          const Determinant out = apply_with_phase(d, exc, phase);
          exc.phase = phase;
          visit(out, exc);
        }
      }
    }
  }
}

std::vector<std::pair<Determinant, Excitation>> connected_excitations(
    const Determinant& d, int norb, const std::optional<OrbitalFilter>& filter) {
  std::vector<std::pair<Determinant, Excitation>> out;
  for_each_connected(
      d, norb, [&out](const Determinant& x, const Excitation& e) { out.emplace_back(x, e); },
      filter);
  return out;
}

namespace {

void render_list(std::string& out, const SpinString& s) {
  bool first = true;
  s.for_each_set([&](int p) {
    if (!first) out += ',';
    out += std::to_string(p);
    first = false;
  });
}

SpinString parse_list(std::string_view body, std::string_view full) {
  SpinString s;
  if (body.empty()) return s;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const std::size_t comma = body.find(',', pos);
    const std::string_view tok =
        body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size() || value < 0 ||
        value >= kMaxOrbitals) {
      throw ParseError("bad orbital index '" + std::string(tok) + "' in determinant '" +
                           std::string(full) + "'",
                       0);
    }
    if (s.test(value)) {
      throw ParseError("repeated orbital in determinant '" + std::string(full) + "'", 0);
    }
    s.set(value);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return s;
}

// Strips one of the accepted spin prefixes; returns false when none matches.
bool strip_prefix(std::string_view& s, std::initializer_list<std::string_view> prefixes) {
  for (auto p : prefixes) {
    if (s.substr(0, p.size()) == p) {
      s.remove_prefix(p.size());
      return true;
    }
  }
  return false;
}

}  // namespace

std::string to_string(const Determinant& d) {
  std::string out = "α:";
  render_list(out, d.alpha);
  out += "|β:";
  render_list(out, d.beta);
  return out;
}

Determinant parse_determinant(std::string_view text) {
  const std::size_t bar = text.find('|');
  if (bar == std::string_view::npos) {
    throw ParseError("determinant '" + std::string(text) + "' lacks '|'", 0);
  }
  std::string_view a = text.substr(0, bar);
  std::string_view b = text.substr(bar + 1);
  if (!strip_prefix(a, {"α:", "a:"}) || !strip_prefix(b, {"β:", "b:"})) {
    throw ParseError("determinant '" + std::string(text) + "' lacks spin prefixes", 0);
  }
  return {parse_list(a, text), parse_list(b, text)};
}

void check_within(const Determinant& d, int norb) {
  if (d.alpha.highest() >= norb || d.beta.highest() >= norb) {
    throw DomainError("determinant " + to_string(d) + " occupies an orbital >= " +
                      std::to_string(norb));
  }
}

}  // namespace asciprep
