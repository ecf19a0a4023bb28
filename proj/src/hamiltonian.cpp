// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "asciprep/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "asciprep/errors.hpp"

namespace asciprep {

std::string_view to_string(ModelSource s) {
  switch (s) {
    case ModelSource::fcidump:
      return "fcidump";
    case ModelSource::hubbard_spatial:
      return "hubbard_spatial";
    case ModelSource::hubbard_planewave:
      return "hubbard_planewave";
  }
  return "unknown";
}

void LatticeSpec::validate() const {
  if (lx <= 0 || ly <= 0) throw DomainError("lattice dimensions must be positive");
  if (sites() > kMaxOrbitals) throw DomainError("lattice has more than 256 sites");
  if (n_alpha < 0 || n_beta < 0 || n_alpha > sites() || n_beta > sites()) {
    throw DomainError("electron counts do not fit the lattice");
  }
  if (!periodic) throw DomainError("only periodic lattices are supported");
}

MomentumLabel add(const MomentumLabel& a, const MomentumLabel& b, const LatticeSpec& spec) {
  return {(a.kx + b.kx) % spec.lx, (a.ky + b.ky) % spec.ly};
}

MomentumLabel negate(const MomentumLabel& a, const LatticeSpec& spec) {
  return {(spec.lx - a.kx) % spec.lx, (spec.ly - a.ky) % spec.ly};
}

TwoBodyTable::TwoBodyTable(int norb) : norb_(norb) {
  const std::size_t npair = static_cast<std::size_t>(norb) * (norb + 1) / 2;
  data_.assign(npair * (npair + 1) / 2, 0.0);
}

IntegralModel::IntegralModel(Eigen::MatrixXd h, TwoBodyTable g, double e_core, int n_alpha,
                             int n_beta)
    : norb_(static_cast<int>(h.rows())),
      source_(ModelSource::fcidump),
      e_core_(e_core),
      n_alpha_(n_alpha),
      n_beta_(n_beta),
      h_(std::move(h)),
      g_(std::move(g)) {
  if (h_.rows() != h_.cols()) throw DomainError("one-body matrix must be square");
  if (norb_ > kMaxOrbitals) throw DomainError("more than 256 orbitals");
  if (g_.norb() != norb_) throw DomainError("one- and two-body tables disagree on NORB");
}

IntegralModel IntegralModel::hubbard_spatial(const LatticeSpec& spec) {
  spec.validate();
  IntegralModel m;
  m.norb_ = spec.sites();
  m.source_ = ModelSource::hubbard_spatial;
  m.n_alpha_ = spec.n_alpha;
  m.n_beta_ = spec.n_beta;
  m.lattice_ = spec;
  m.neighbors_.resize(m.norb_);
  for (int x = 0; x < spec.lx; ++x) {
    for (int y = 0; y < spec.ly; ++y) {
      const int i = spec.index(x, y);
      const int cand[4] = {spec.index((x + 1) % spec.lx, y),
                           spec.index((x + spec.lx - 1) % spec.lx, y),
                           spec.index(x, (y + 1) % spec.ly), spec.index(x, (y + spec.ly - 1) % spec.ly)};
      for (int j : cand) {
        if (j != i) m.neighbors_[i].push_back(j);
      }
      // L = 2 wraps onto the same neighbour twice: one bond, not two.
      auto& nb = m.neighbors_[i];
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
  }
  m.h_ = Eigen::MatrixXd::Zero(m.norb_, m.norb_);
  for (int i = 0; i < m.norb_; ++i) {
    for (int j : m.neighbors_[i]) m.h_(i, j) = -spec.t;
  }
  return m;
}

IntegralModel IntegralModel::hubbard_planewave(const LatticeSpec& spec) {
  spec.validate();
  IntegralModel m;
  m.norb_ = spec.sites();
  m.source_ = ModelSource::hubbard_planewave;
  m.n_alpha_ = spec.n_alpha;
  m.n_beta_ = spec.n_beta;
  m.lattice_ = spec;
  m.u_over_n_ = spec.u / spec.sites();
  m.band_.resize(m.norb_);
  m.k_of_.resize(m.norb_);
  for (int kx = 0; kx < spec.lx; ++kx) {
    for (int ky = 0; ky < spec.ly; ++ky) {
      const int p = spec.index(kx, ky);
      m.k_of_[p] = {kx, ky};
      m.band_[p] = -2.0 * spec.t *
                   (std::cos(2.0 * std::numbers::pi * kx / spec.lx) +
                    std::cos(2.0 * std::numbers::pi * ky / spec.ly));
    }
  }
  return m;
}

IntegralModel build_hubbard_spatial(const LatticeSpec& spec) {
  return IntegralModel::hubbard_spatial(spec);
}

IntegralModel build_hubbard_planewave(const LatticeSpec& spec) {
  return IntegralModel::hubbard_planewave(spec);
}

double IntegralModel::one_body(int p, int q) const {
  if (source_ == ModelSource::hubbard_planewave) return p == q ? band_[p] : 0.0;
  return h_(p, q);
}

double IntegralModel::two_body(int p, int q, int r, int s) const {
  switch (source_) {
    case ModelSource::fcidump:
      return g_.get(p, q, r, s);
    case ModelSource::hubbard_spatial:
      return (p == q && q == r && r == s) ? lattice_->u : 0.0;
    case ModelSource::hubbard_planewave: {
      const auto& spec = *lattice_;
      const int dx = k_of_[q].kx + k_of_[s].kx - k_of_[p].kx - k_of_[r].kx;
      const int dy = k_of_[q].ky + k_of_[s].ky - k_of_[p].ky - k_of_[r].ky;
      return (dx % spec.lx == 0 && dy % spec.ly == 0) ? u_over_n_ : 0.0;
    }
  }
  return 0.0;
}

Eigen::MatrixXd IntegralModel::one_body_matrix() const {
  Eigen::MatrixXd h(norb_, norb_);
  for (int p = 0; p < norb_; ++p) {
    for (int q = 0; q < norb_; ++q) h(p, q) = one_body(p, q);
  }
  return h;
}

TwoBodyTable IntegralModel::two_body_table() const {
  if (source_ == ModelSource::fcidump) return g_;
  if (!dense_capable()) throw DomainError("plane-wave Hubbard integrals are not real-symmetric");
  TwoBodyTable g(norb_);
  for (int i = 0; i < norb_; ++i) g.set(i, i, i, i, lattice_->u);
  return g;
}

MomentumLabel IntegralModel::momentum(int p) const {
  if (source_ != ModelSource::hubbard_planewave) {
    throw DomainError("momentum labels exist only for plane-wave models");
  }
  return k_of_.at(p);
}

int IntegralModel::orbital_of(const MomentumLabel& k) const {
  if (source_ != ModelSource::hubbard_planewave) {
    throw DomainError("momentum labels exist only for plane-wave models");
  }
  return lattice_->index(k.kx, k.ky);
}

double IntegralModel::diagonal(const Determinant& d) const {
  switch (source_) {
    case ModelSource::hubbard_spatial:
      return lattice_->u * (d.alpha & d.beta).count();
    case ModelSource::hubbard_planewave: {
      double e = 0.0;
      d.alpha.for_each_set([&](int p) { e += band_[p]; });
      d.beta.for_each_set([&](int p) { e += band_[p]; });
      return e + u_over_n_ * d.n_alpha() * d.n_beta();
    }
    case ModelSource::fcidump:
      return sc_diagonal(d);
  }
  return 0.0;
}

double IntegralModel::off_diagonal(const Determinant& ket, const Excitation& exc) const {
  if (exc.degree == 0) return diagonal(ket);
  switch (source_) {
    case ModelSource::hubbard_spatial: {
      if (exc.degree != 1) return 0.0;
      return exc.phase * h_(exc.particles[0].orbital, exc.holes[0].orbital);
    }
    case ModelSource::hubbard_planewave: {
      if (exc.degree != 2 || exc.holes[0].spin == exc.holes[1].spin) return 0.0;
      const auto& spec = *lattice_;
      const auto& ka = k_of_[exc.particles[0].orbital];
      const auto& ki = k_of_[exc.holes[0].orbital];
      const auto& kb = k_of_[exc.particles[1].orbital];
      const auto& kj = k_of_[exc.holes[1].orbital];
      const bool conserved = (ka.kx + kb.kx - ki.kx - kj.kx) % spec.lx == 0 &&
                             (ka.ky + kb.ky - ki.ky - kj.ky) % spec.ly == 0;
      return conserved ? exc.phase * u_over_n_ : 0.0;
    }
    case ModelSource::fcidump:
      return sc_off_diagonal(ket, exc);
  }
  return 0.0;
}

double IntegralModel::sc_diagonal(const Determinant& d) const {
  std::vector<int> occ[2] = {d.alpha.orbitals(), d.beta.orbitals()};
  double e = e_core_;
  for (const auto& o : occ) {
    for (int i : o) e += one_body(i, i);
  }
  // 1/2 Σ_ij [(ii|jj) - δ_στ (ij|ji)] over ordered pairs, i != j within a spin.
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < 2; ++t) {
      for (int i : occ[s]) {
        for (int j : occ[t]) {
          double v = two_body(i, i, j, j);
          if (s == t) v -= two_body(i, j, j, i);
          e += 0.5 * v;
        }
      }
    }
  }
  return e;
}

double IntegralModel::sc_off_diagonal(const Determinant& ket, const Excitation& exc) const {
  if (exc.degree == 1) {
    const int i = exc.holes[0].orbital;
    const int a = exc.particles[0].orbital;
    const Spin s = exc.holes[0].spin;
    double v = one_body(a, i);
    for (Spin t : {Spin::alpha, Spin::beta}) {
      ket.spin(t).for_each_set([&](int j) {
        if (t == s && j == i) return;
        v += two_body(a, i, j, j);
        if (t == s) v -= two_body(a, j, j, i);
      });
    }
    return exc.phase * v;
  }
  if (exc.degree == 2) {
    const auto& h = exc.holes;
    const auto& p = exc.particles;
    double v = 0.0;
    if (p[0].spin == h[0].spin && p[1].spin == h[1].spin) {
      v += two_body(p[0].orbital, h[0].orbital, p[1].orbital, h[1].orbital);
    }
    if (p[0].spin == h[1].spin && p[1].spin == h[0].spin) {
      v -= two_body(p[0].orbital, h[1].orbital, p[1].orbital, h[0].orbital);
    }
    return exc.phase * v;
  }
  return 0.0;
}

double IntegralModel::slater_condon(const Determinant& bra, const Determinant& ket) const {
  const auto exc = find_excitation(bra, ket);
  if (!exc) return 0.0;
  if (exc->degree == 0) return sc_diagonal(ket);
  return sc_off_diagonal(ket, *exc);
}

double matrix_element(const IntegralModel& m, const Determinant& a, const Determinant& b) {
  check_within(a, m.norb());
  check_within(b, m.norb());
  if (a.n_alpha() != b.n_alpha() || a.n_beta() != b.n_beta()) {
    throw DomainError("matrix_element: particle numbers differ");
  }
  if (a == b) return m.diagonal(a);
  const auto exc = find_excitation(a, b);
  if (!exc) return 0.0;
  return m.off_diagonal(b, *exc);
}

MomentumLabel total_momentum(const Determinant& d, const LatticeSpec& spec) {
  int kx = 0;
  int ky = 0;
  auto acc = [&](int p) {
    kx += p / spec.ly;
    ky += p % spec.ly;
  };
  d.alpha.for_each_set(acc);
  d.beta.for_each_set(acc);
  return {kx % spec.lx, ky % spec.ly};
}

PatternKind parse_pattern_kind(std::string_view s) {
  if (s == "aufbau") return PatternKind::aufbau;
  if (s == "afm") return PatternKind::afm;
  if (s == "sdw") return PatternKind::sdw;
  if (s == "user") return PatternKind::user;
  throw DomainError("unknown initial-determinant pattern '" + std::string(s) + "'");
}

namespace {

// Orbitals sorted by diagonal one-body energy, ties by index.
std::vector<int> energy_order(const IntegralModel& model) {
  std::vector<int> order(model.norb());
  for (int p = 0; p < model.norb(); ++p) order[p] = p;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return model.one_body(a, a) < model.one_body(b, b);
  });
  return order;
}

// All size-k subsets of items, lexicographic in position.
void for_each_subset(const std::vector<int>& items, int k,
                     const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (static_cast<int>(pick.size()) == k) {
      f(pick);
      return;
    }
    for (std::size_t i = start; i < items.size(); ++i) {
      pick.push_back(items[i]);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
}

struct ShellSplit {
  std::vector<int> closed;  // always filled
  std::vector<int> open;    // degenerate shell containing the Fermi level
  int n_open = 0;           // electrons placed in the open shell
};

ShellSplit split_shells(const IntegralModel& model, const std::vector<int>& order, int n) {
  ShellSplit s;
  if (n == 0) return s;
  constexpr double kDegenerate = 1e-10;
  const double fermi = model.one_body(order[n - 1], order[n - 1]);
  for (int p : order) {
    const double e = model.one_body(p, p);
    if (e < fermi - kDegenerate) {
      s.closed.push_back(p);
    } else if (std::abs(e - fermi) <= kDegenerate) {
      s.open.push_back(p);
    }
  }
  s.n_open = n - static_cast<int>(s.closed.size());
  return s;
}

Determinant sector_aufbau(const IntegralModel& model, int na, int nb,
                          const MomentumLabel& sector) {
  const auto& spec = *model.lattice();
  const auto order = energy_order(model);
  const ShellSplit sa = split_shells(model, order, na);
  const ShellSplit sb = split_shells(model, order, nb);
  std::optional<Determinant> best;
  double best_e = 0.0;
  for_each_subset(sa.open, sa.n_open, [&](const std::vector<int>& pa) {
    for_each_subset(sb.open, sb.n_open, [&](const std::vector<int>& pb) {
      std::vector<int> a = sa.closed;
      a.insert(a.end(), pa.begin(), pa.end());
      std::vector<int> b = sb.closed;
      b.insert(b.end(), pb.begin(), pb.end());
      const Determinant d = Determinant::from_orbitals(a, b);
      if (total_momentum(d, spec) != sector) return;
      const double e = model.diagonal(d);
      if (!best || e < best_e || (e == best_e && d < *best)) {
        best = d;
        best_e = e;
      }
    });
  });
  if (!best) {
    throw DomainError("no aufbau-shell determinant lies in momentum sector (" +
                      std::to_string(sector.kx) + "," + std::to_string(sector.ky) + ")");
  }
  return *best;
}

const LatticeSpec& require_lattice(const IntegralModel& model, std::string_view what) {
  if (!model.lattice()) {
    throw DomainError(std::string(what) + " pattern requires a lattice model");
  }
  return *model.lattice();
}

}  // namespace

Determinant pattern_determinant(PatternKind kind, const IntegralModel& model, int n_alpha,
                                int n_beta, const std::optional<MomentumLabel>& sector,
                                std::string_view user_text) {
  const int m = model.norb();
  if (n_alpha < 0 || n_beta < 0 || n_alpha > m || n_beta > m) {
    throw DomainError("electron counts do not fit " + std::to_string(m) + " orbitals");
  }
  Determinant d;
  switch (kind) {
    case PatternKind::aufbau: {
      if (sector) {
        if (model.source() != ModelSource::hubbard_planewave) {
          throw DomainError("momentum sectors apply only to plane-wave models");
        }
        return sector_aufbau(model, n_alpha, n_beta, *sector);
      }
      const auto order = energy_order(model);
      for (int i = 0; i < n_alpha; ++i) d.alpha.set(order[i]);
      for (int i = 0; i < n_beta; ++i) d.beta.set(order[i]);
      return d;
    }
    case PatternKind::afm: {
      const auto& spec = require_lattice(model, "afm");
      const bool bipartite = spec.lx % 2 == 0 && (spec.ly % 2 == 0 || spec.ly == 1);
      if (!bipartite || n_alpha != m / 2 || n_beta != m / 2) {
        throw DomainError("afm pattern needs half filling on a bipartite lattice");
      }
      for (int x = 0; x < spec.lx; ++x) {
        for (int y = 0; y < spec.ly; ++y) {
          ((x + y) % 2 == 0 ? d.alpha : d.beta).set(spec.index(x, y));
        }
      }
      return d;
    }
    case PatternKind::sdw: {
      const auto& spec = require_lattice(model, "sdw");
      if (spec.lx % 2 != 0 || n_alpha != m / 2 || n_beta != m / 2) {
        throw DomainError("sdw pattern needs half filling and an even Lx");
      }
      for (int x = 0; x < spec.lx; ++x) {
        for (int y = 0; y < spec.ly; ++y) (x % 2 == 0 ? d.alpha : d.beta).set(spec.index(x, y));
      }
      return d;
    }
    case PatternKind::user: {
      d = parse_determinant(user_text);
      check_within(d, m);
      if (d.n_alpha() != n_alpha || d.n_beta() != n_beta) {
        throw DomainError("user determinant " + to_string(d) + " has the wrong electron count");
      }
      return d;
    }
  }
  return d;
}

}  // namespace asciprep
