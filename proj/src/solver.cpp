// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "asciprep/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include "asciprep/errors.hpp"

namespace asciprep {

// ---------------------------------------------------------------------------
// Wavefunction

void Wavefunction::canonicalize() {
  if (dets.size() != coeffs.size()) throw DomainError("wavefunction: size mismatch");
  std::vector<std::size_t> order(dets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ca = std::abs(coeffs[a]);
    const double cb = std::abs(coeffs[b]);
    if (ca != cb) return ca > cb;
    return dets[a] < dets[b];
  });
  std::vector<Determinant> d;
  std::vector<double> c;
  d.reserve(order.size());
  c.reserve(order.size());
  for (auto i : order) {
    d.push_back(dets[i]);
    c.push_back(coeffs[i]);
  }
  dets = std::move(d);
  coeffs = std::move(c);
  auto sorted = dets;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("wavefunction contains duplicate determinants");
  }
}

void Wavefunction::normalize() {
  double n2 = 0.0;
  for (double c : coeffs) n2 += c * c;
  if (n2 == 0.0) throw DomainError("cannot normalize a zero wavefunction");
  const double s = 1.0 / std::sqrt(n2);
  for (double& c : coeffs) c *= s;
}

double Wavefunction::top_weight() const {
  double w = 0.0;
  for (double c : coeffs) w = std::max(w, c * c);
  return w;
}

Wavefunction Wavefunction::truncated(std::size_t n) const {
  Wavefunction out;
  n = std::min(n, size());
  out.dets.assign(dets.begin(), dets.begin() + static_cast<std::ptrdiff_t>(n));
  out.coeffs.assign(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(n));
  out.energy = energy;
  out.normalize();
  return out;
}

DeterminantIndex index_of(std::span<const Determinant> dets) {
  DeterminantIndex idx;
  idx.reserve(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (!idx.emplace(dets[i], static_cast<std::uint32_t>(i)).second) {
      throw DomainError("duplicate determinant " + to_string(dets[i]));
    }
  }
  return idx;
}

// ---------------------------------------------------------------------------
// Projected Hamiltonian

SpaceHamiltonian::SpaceHamiltonian(const IntegralModel& model, std::span<const Determinant> space) {
  if (space.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw SizeGuardError("determinant space exceeds 2^32 entries", space.size());
  }
  const DeterminantIndex idx = index_of(space);
  diag_.resize(space.size());
  row_ptr_.assign(space.size() + 1, 0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    diag_[i] = model.diagonal(space[i]);
    model.for_each_connection(space[i], [&](const Determinant& bra, double v) {
      const auto it = idx.find(bra);
      if (it == idx.end()) return;
      cols_.push_back(it->second);
      vals_.push_back(v);
    });
    row_ptr_[i + 1] = cols_.size();
  }
  cols_.shrink_to_fit();
  vals_.shrink_to_fit();
}

void SpaceHamiltonian::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = diag_.size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag_[i] * x[i];
    for (std::uint64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += vals_[k] * x[cols_[k]];
    y[i] = s;
  }
}

LinearOperator SpaceHamiltonian::as_operator() const {
  return [this](std::span<const double> x, std::span<double> y) { apply(x, y); };
}

EigenPair davidson_ground_state(const IntegralModel& model, std::span<const Determinant> space,
                                double tol, std::vector<double> guess) {
  if (space.empty()) throw DomainError("davidson_ground_state: empty space");
  const int na = space.front().n_alpha();
  const int nb = space.front().n_beta();
  for (const auto& d : space) {
    if (d.n_alpha() != na || d.n_beta() != nb) {
      throw DomainError("davidson_ground_state: inconsistent particle numbers");
    }
  }
  const SpaceHamiltonian h(model, space);
  DavidsonOptions opts;
  opts.tol = tol;
  return davidson(h.as_operator(), h.diagonal(), std::move(guess), opts);
}

// ---------------------------------------------------------------------------
// Space enumeration

namespace {

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  if (r > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 4)) {
    return std::numeric_limits<std::size_t>::max() / 4;
  }
  return static_cast<std::size_t>(std::llround(r));
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    return std::numeric_limits<std::size_t>::max();
  }
  return a * b;
}

// All n-subsets of [0, m) as spin strings, ascending.
std::vector<SpinString> strings(int m, int n) {
  std::vector<SpinString> out;
  out.reserve(binomial(m, n));
  SpinString cur;
  std::function<void(int, int)> rec = [&](int start, int left) {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (int p = start; p <= m - left; ++p) {
      cur.set(p);
      rec(p + 1, left - 1);
      cur.reset(p);
    }
  };
  rec(0, n);
  std::sort(out.begin(), out.end());
  return out;
}

MomentumLabel string_momentum(const SpinString& s, const LatticeSpec& spec) {
  Determinant d;
  d.alpha = s;
  return total_momentum(d, spec);
}

void check_sector(const IntegralModel& model, const SectorSpec& sector) {
  const int m = model.norb();
  if (sector.n_alpha < 0 || sector.n_beta < 0 || sector.n_alpha > m || sector.n_beta > m) {
    throw DomainError("sector electron counts do not fit " + std::to_string(m) + " orbitals");
  }
  if (sector.momentum && model.source() != ModelSource::hubbard_planewave) {
    throw DomainError("momentum sectors apply only to plane-wave models");
  }
  if (sector.momentum) {
    const auto& spec = *model.lattice();
    const auto& k = *sector.momentum;
    if (k.kx < 0 || k.kx >= spec.lx || k.ky < 0 || k.ky >= spec.ly) {
      throw DomainError("momentum label outside the Brillouin zone");
    }
  }
}

// Strings of each spin grouped by momentum; only used for sector enumeration.
struct MomentumGroups {
  std::map<MomentumLabel, std::vector<SpinString>> alpha;
  std::map<MomentumLabel, std::vector<SpinString>> beta;
};

MomentumGroups group_strings(const IntegralModel& model, const SectorSpec& sector,
                             std::size_t cap) {
  const auto& spec = *model.lattice();
  const int m = model.norb();
  const std::size_t na = binomial(m, sector.n_alpha);
  const std::size_t nb = binomial(m, sector.n_beta);
  if (na > cap || nb > cap) {
    throw SizeGuardError("sector enumeration needs about " +
                             std::to_string(saturating_mul(na, nb) / spec.sites()) +
                             " determinants",
                         saturating_mul(na, nb) / spec.sites());
  }
  MomentumGroups g;
  for (const auto& s : strings(m, sector.n_alpha)) g.alpha[string_momentum(s, spec)].push_back(s);
  for (const auto& s : strings(m, sector.n_beta)) g.beta[string_momentum(s, spec)].push_back(s);
  return g;
}

}  // namespace

std::size_t sector_size(const IntegralModel& model, const SectorSpec& sector, std::size_t cap) {
  check_sector(model, sector);
  const int m = model.norb();
  if (!sector.momentum) {
    return saturating_mul(binomial(m, sector.n_alpha), binomial(m, sector.n_beta));
  }
  const auto& spec = *model.lattice();
  const auto g = group_strings(model, sector, cap);
  std::size_t total = 0;
  for (const auto& [ka, sa] : g.alpha) {
    const MomentumLabel kb = add(*sector.momentum, negate(ka, spec), spec);
    const auto it = g.beta.find(kb);
    if (it != g.beta.end()) total += sa.size() * it->second.size();
  }
  return total;
}

std::vector<Determinant> enumerate_space(const IntegralModel& model, const SectorSpec& sector,
                                         std::size_t cap) {
  check_sector(model, sector);
  const std::size_t size = sector_size(model, sector, cap);
  if (size > cap) {
    throw SizeGuardError("space of " + std::to_string(size) + " determinants exceeds cap of " +
                             std::to_string(cap),
                         size);
  }
  std::vector<Determinant> out;
  out.reserve(size);
  const int m = model.norb();
  if (!sector.momentum) {
    const auto sa = strings(m, sector.n_alpha);
    const auto sb = strings(m, sector.n_beta);
    for (const auto& a : sa) {
      for (const auto& b : sb) out.push_back({a, b});
    }
    return out;
  }
  const auto& spec = *model.lattice();
  const auto g = group_strings(model, sector, cap);
  for (const auto& [ka, sa] : g.alpha) {
    const MomentumLabel kb = add(*sector.momentum, negate(ka, spec), spec);
    const auto it = g.beta.find(kb);
    if (it == g.beta.end()) continue;
    for (const auto& a : sa) {
      for (const auto& b : it->second) out.push_back({a, b});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ExactResult exact_diagonalize(const IntegralModel& model, const SectorSpec& sector, double tol,
                              std::size_t cap) {
  ExactResult r;
  auto space = enumerate_space(model, sector, cap);
  if (space.empty()) throw DomainError("empty sector");
  r.space_size = space.size();
  const EigenPair ep = davidson_ground_state(model, space, tol);
  r.energy = ep.value;
  r.wavefunction.dets = std::move(space);
  r.wavefunction.coeffs = ep.vector;
  r.wavefunction.energy = ep.value;
  r.wavefunction.canonicalize();
  return r;
}

// ---------------------------------------------------------------------------
// Selection and PT2

double regularized_denominator(double e, double hii) {
  constexpr double kFloor = 1e-8;
  const double d = e - hii;
  if (std::abs(d) < kFloor) return d < 0 ? -kFloor : kFloor;
  return d;
}

namespace {

using Accumulator = std::unordered_map<Determinant, double, DeterminantHash>;

// Σ_j H_ij C_j for every exterior i reached from dets[0..n), optionally
// restricted to a hash bucket. Contributions are added in parent order.
void accumulate(const IntegralModel& model, const Wavefunction& wf, std::size_t n,
                const DeterminantIndex& inner, const DeterminantIndex* exclude,
                std::size_t buckets, std::size_t bucket, Accumulator& acc) {
  const DeterminantHash hash;
  for (std::size_t j = 0; j < n; ++j) {
    const double cj = wf.coeffs[j];
    model.for_each_connection(wf.dets[j], [&](const Determinant& bra, double v) {
      if (buckets > 1 && (hash(bra) >> 7) % buckets != bucket) return;
      if (inner.contains(bra)) return;
      if (exclude && exclude->contains(bra)) return;
      acc[bra] += v * cj;
    });
  }
}

std::vector<std::pair<Determinant, double>> sorted_entries(const Accumulator& acc) {
  std::vector<std::pair<Determinant, double>> v(acc.begin(), acc.end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return v;
}

}  // namespace

std::vector<ScoredDeterminant> rank_candidates(const IntegralModel& model,
                                               const Wavefunction& core, double energy,
                                               const DeterminantIndex* exclude,
                                               const std::optional<MomentumLabel>& sector) {
  if (core.size() == 0) throw DomainError("rank_candidates: empty core");
  const DeterminantIndex inner = index_of(core.dets);
  Accumulator acc;
  accumulate(model, core, core.size(), inner, exclude, 1, 0, acc);

  std::vector<ScoredDeterminant> out;
  out.reserve(acc.size());
  for (const auto& [det, num] : sorted_entries(acc)) {
    if (sector && total_momentum(det, *model.lattice()) != *sector) continue;
    const double est = num / regularized_denominator(energy, model.diagonal(det));
    out.push_back({det, std::abs(est), est});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.det < b.det;
  });
  return out;
}

double pt2_correction(const IntegralModel& model, const Wavefunction& wf, double energy) {
  if (wf.size() == 0) return 0.0;
  const DeterminantIndex inner = index_of(wf.dets);
  // Bound the accumulator to roughly 2e7 entries per pass.
  std::size_t conn = 0;
  model.for_each_connection(wf.dets.front(), [&conn](const Determinant&, double) { ++conn; });
  const std::size_t estimate = saturating_mul(wf.size(), std::max<std::size_t>(conn, 1));
  const std::size_t buckets = std::max<std::size_t>(1, estimate / 20'000'000 + 1);

  double e2 = 0.0;
  for (std::size_t b = 0; b < buckets; ++b) {
    Accumulator acc;
    accumulate(model, wf, wf.size(), inner, nullptr, buckets, b, acc);
    for (const auto& [det, num] : sorted_entries(acc)) {
      e2 += num * num / regularized_denominator(energy, model.diagonal(det));
    }
  }
  return e2;
}

// ---------------------------------------------------------------------------
// ASCI

std::size_t AsciConfig::core_size() const {
  if (cdets != 0) return std::min(cdets, tdets);
  return std::min(tdets, std::max<std::size_t>(1000, tdets / 10));
}

void AsciConfig::validate() const {
  if (tdets < 1) throw DomainError("tdets must be >= 1");
  if (cdets > tdets) throw DomainError("cdets must not exceed tdets");
  if (!(energy_tol > 0) || !(davidson_tol > 0)) throw DomainError("tolerances must be positive");
  if (max_iter < 0) throw DomainError("max_iter must be >= 0");
}

namespace {

Wavefunction solve_space(const IntegralModel& model, std::vector<Determinant> space, double tol,
                         std::vector<double> guess) {
  EigenPair ep;
  try {
    ep = davidson_ground_state(model, space, tol, std::move(guess));
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string("ASCI diagonalization of ") +
                               std::to_string(space.size()) + " determinants: " + e.what(),
                           e.energy, e.residual, e.vector);
  }
  Wavefunction wf;
  wf.dets = std::move(space);
  wf.coeffs = std::move(ep.vector);
  wf.energy = ep.value;
  wf.canonicalize();
  return wf;
}

}  // namespace

AsciResult asci_run(const IntegralModel& model, const std::vector<Determinant>& initial,
                    const AsciConfig& cfg) {
  cfg.validate();
  if (initial.empty()) throw DomainError("asci_run: no initial determinants");
  const int na = initial.front().n_alpha();
  const int nb = initial.front().n_beta();
  for (const auto& d : initial) {
    check_within(d, model.norb());
    if (d.n_alpha() != na || d.n_beta() != nb) {
      throw DomainError("asci_run: initial determinants disagree on particle numbers");
    }
    if (cfg.sector) {
      if (model.source() != ModelSource::hubbard_planewave) {
        throw DomainError("momentum sectors apply only to plane-wave models");
      }
      if (total_momentum(d, *model.lattice()) != *cfg.sector) {
        throw DomainError("initial determinant " + to_string(d) + " lies outside the sector");
      }
    }
  }
  std::vector<Determinant> space = initial;
  std::sort(space.begin(), space.end());
  if (std::adjacent_find(space.begin(), space.end()) != space.end()) {
    throw DomainError("asci_run: duplicate initial determinants");
  }

  AsciResult result;
  Wavefunction wf = solve_space(model, space, cfg.davidson_tol, {});
  auto log = [&](int iter, const Wavefunction& w) {
    IterationRecord rec;
    rec.iter = iter;
    rec.space_size = w.size();
    rec.e_var = w.energy;
    rec.e_pt2 = cfg.pt2_each_iteration ? pt2_correction(model, w, w.energy)
                                       : std::numeric_limits<double>::quiet_NaN();
    rec.top_weight = w.top_weight();
    result.iterations.push_back(rec);
  };
  log(0, wf);

  const std::size_t ncore = cfg.core_size();
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    const DeterminantIndex current = index_of(wf.dets);
    Wavefunction core = wf;
    if (core.size() > ncore) {
      core.dets.resize(ncore);
      core.coeffs.resize(ncore);
    }
    const auto cands = rank_candidates(model, core, wf.energy, &current, cfg.sector);

    // Merge current |C| with candidate scores; both estimate |C_i|.
    struct Entry {
      double value;
      const Determinant* det;
      double guess;
    };
    std::vector<Entry> pool;
    pool.reserve(wf.size() + cands.size());
    for (std::size_t i = 0; i < wf.size(); ++i) {
      pool.push_back({std::abs(wf.coeffs[i]), &wf.dets[i], wf.coeffs[i]});
    }
    for (const auto& c : cands) pool.push_back({c.score, &c.det, c.estimate});
    const std::size_t keep = std::min(cfg.tdets, pool.size());
    std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(keep), pool.end(),
                      [](const Entry& a, const Entry& b) {
                        if (a.value != b.value) return a.value > b.value;
                        return *a.det < *b.det;
                      });
    pool.resize(keep);
    std::sort(pool.begin(), pool.end(),
              [](const Entry& a, const Entry& b) { return *a.det < *b.det; });

    std::vector<Determinant> next;
    std::vector<double> guess;
    next.reserve(keep);
    guess.reserve(keep);
    bool changed = keep != wf.size();
    for (const auto& e : pool) {
      next.push_back(*e.det);
      guess.push_back(e.guess);
      if (!changed && !current.contains(*e.det)) changed = true;
    }
    if (!changed) {
      result.converged = true;
      break;
    }

    Wavefunction trial = solve_space(model, std::move(next), cfg.davidson_tol, std::move(guess));
    if (trial.energy > wf.energy + cfg.davidson_tol) {
      // Pruning would lose variational energy; keep the previous space.
      result.converged = true;
      break;
    }
    const double delta = std::abs(trial.energy - wf.energy);
    wf = std::move(trial);
    log(iter, wf);
    if (delta < cfg.energy_tol && wf.size() >= cfg.tdets) {
      result.converged = true;
      break;
    }
  }

  result.e_var = wf.energy;
  result.e_pt2 = pt2_correction(model, wf, wf.energy);
  result.iterations.back().e_pt2 = result.e_pt2;
  result.final = std::move(wf);
  return result;
}

void write_iteration_log(std::ostream& out, const std::vector<IterationRecord>& log) {
  out << "# iter space_size e_var e_pt2 top_weight\n";
  char buf[160];
  for (const auto& r : log) {
    std::snprintf(buf, sizeof buf, "%d %zu %.17g %.17g %.17g\n", r.iter, r.space_size, r.e_var,
                  r.e_pt2, r.top_weight);
    out << buf;
  }
}

}  // namespace asciprep
