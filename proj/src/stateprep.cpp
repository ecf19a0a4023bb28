// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "asciprep/stateprep.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "asciprep/errors.hpp"

namespace asciprep {

// ---------------------------------------------------------------------------
// QubitPattern

QubitPattern::QubitPattern(int n) : n_(n) {
  if (n < 0 || n > kWords * 64) throw DomainError("qubit count out of range");
}

QubitPattern QubitPattern::from_determinant(const Determinant& d, int norb) {
  QubitPattern p(2 * norb);
  d.alpha.for_each_set([&](int q) { p.set(q, true); });
  d.beta.for_each_set([&](int q) { p.set(norb + q, true); });
  return p;
}

QubitPattern QubitPattern::from_mask(int n, std::uint64_t mask) {
  if (n > 64) throw DomainError("from_mask supports at most 64 qubits");
  QubitPattern p(n);
  p.words_[0] = n == 64 ? mask : (mask & ((std::uint64_t{1} << n) - 1));
  return p;
}

int QubitPattern::count() const {
  int c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

QubitPattern QubitPattern::widened(int n) const {
  if (n < n_) throw DomainError("cannot narrow a qubit pattern");
  QubitPattern p = *this;
  p.n_ = n;
  return p;
}

std::uint64_t QubitPattern::index() const {
  if (n_ > 63) throw DomainError("basis index needs more than 63 qubits");
  return words_[0];
}

int hamming(const QubitPattern& a, const QubitPattern& b) {
  int d = 0;
  for (int i = 0; i < QubitPattern::kWords; ++i) d += std::popcount(a.word(i) ^ b.word(i));
  return d;
}

// ---------------------------------------------------------------------------
// Ordering and planning

std::vector<std::size_t> order_determinants(const std::vector<QubitPattern>& dets,
                                            const std::vector<double>& coeffs) {
  const std::size_t l = dets.size();
  if (l == 0) throw DomainError("order_determinants: empty input");
  if (coeffs.size() != l) throw DomainError("order_determinants: size mismatch");
  {
    auto sorted = dets;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DomainError("order_determinants: duplicate determinants");
    }
  }
  std::size_t start = 0;
  for (std::size_t i = 1; i < l; ++i) {
    const double a = std::abs(coeffs[i]);
    const double b = std::abs(coeffs[start]);
    if (a > b || (a == b && dets[i] < dets[start])) start = i;
  }
  std::vector<std::size_t> order{start};
  std::vector<char> used(l, 0);
  used[start] = 1;
  while (order.size() < l) {
    const QubitPattern& cur = dets[order.back()];
    std::size_t best = l;
    int best_d = 0;
    for (std::size_t i = 0; i < l; ++i) {
      if (used[i]) continue;
      const int d = hamming(cur, dets[i]);
      if (best == l || d < best_d || (d == best_d && dets[i] < dets[best])) {
        best = i;
        best_d = d;
      }
    }
    used[best] = 1;
    order.push_back(best);
  }
  return order;
}

int path_length(const std::vector<QubitPattern>& dets) {
  int total = 0;
  for (std::size_t i = 1; i < dets.size(); ++i) total += hamming(dets[i - 1], dets[i]);
  return total;
}

PrepPlan make_plan(int n_system, std::vector<QubitPattern> dets, std::vector<double> amplitudes) {
  const std::size_t l = dets.size();
  if (l == 0) throw DomainError("state preparation needs at least one determinant");
  if (amplitudes.size() != l) throw DomainError("plan: size mismatch");
  for (auto& d : dets) {
    QubitPattern fit(n_system);
    for (int q = 0; q < d.size(); ++q) {
      if (!d.test(q)) continue;
      if (q >= n_system) throw DomainError("determinant sets a qubit beyond the system register");
      fit.set(q, true);
    }
    d = fit;
  }
  {
    auto sorted = dets;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DomainError("plan: duplicate determinants");
    }
  }
  double norm2 = 0.0;
  for (double a : amplitudes) norm2 += a * a;
  if (std::abs(norm2 - 1.0) > 1e-12) {
    throw DomainError("plan: amplitudes are not normalized (sum of squares " +
                      std::to_string(norm2) + ")");
  }

  PrepPlan plan;
  plan.n_system = n_system;
  double consumed = 0.0;
  for (std::size_t s = 0; s + 1 < l; ++s) {
    const double beta = std::sqrt(std::max(0.0, 1.0 - consumed));
    if (beta < 1e-12) {
      throw DomainError("plan: amplitude tail vanishes before the last determinant");
    }
    consumed += amplitudes[s] * amplitudes[s];
    const double next = s + 2 == l ? amplitudes[l - 1] : std::sqrt(std::max(0.0, 1.0 - consumed));
    int pivot = -1;
    for (int q = 0; q < n_system; ++q) {
      if (dets[s].test(q) != dets[s + 1].test(q)) {
        pivot = q;
        break;
      }
    }
    plan.pivots.push_back(pivot);
    plan.angles.push_back(2.0 * std::atan2(next, amplitudes[s]));
  }
  plan.dets = std::move(dets);
  plan.amplitudes = std::move(amplitudes);
  return plan;
}

PrepPlan plan_from_wavefunction(const Wavefunction& wf, int norb, bool hamming_order) {
  std::vector<QubitPattern> pats;
  pats.reserve(wf.size());
  for (const auto& d : wf.dets) pats.push_back(QubitPattern::from_determinant(d, norb));
  double n2 = 0.0;
  for (double c : wf.coeffs) n2 += c * c;
  if (n2 == 0.0) throw DomainError("cannot prepare a zero wavefunction");
  const double s = 1.0 / std::sqrt(n2);

  std::vector<std::size_t> order(wf.size());
  if (hamming_order) {
    order = order_determinants(pats, wf.coeffs);
  } else {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  }
  std::vector<QubitPattern> d;
  std::vector<double> a;
  for (auto i : order) {
    d.push_back(pats[i]);
    a.push_back(wf.coeffs[i] * s);
  }
  // Rounding in the rescale can leave |Σa² - 1| slightly above 1e-12 for long lists.
  double m2 = 0.0;
  for (double x : a) m2 += x * x;
  const double fix = 1.0 / std::sqrt(m2);
  for (double& x : a) x *= fix;
  return make_plan(2 * norb, std::move(d), std::move(a));
}

// ---------------------------------------------------------------------------
// Synthesis

Circuit synthesize(const PrepPlan& plan) {
  const std::size_t l = plan.dets.size();
  if (l == 0) throw DomainError("synthesize: empty plan");
  if (plan.pivots.size() + 1 != l || plan.angles.size() + 1 != l) {
    throw DomainError("synthesize: malformed plan");
  }
  Circuit c;
  c.n_system = plan.n_system;
  c.uses_aux = l > 1;
  const int aux = c.aux();
  const int n = plan.n_system;

  for (int q = 0; q < n; ++q) {
    if (plan.dets[0].test(q)) c.gates.push_back({GateKind::X, q, {}, 0.0});
  }
  if (l == 1) return c;
  c.gates.push_back({GateKind::X, aux, {}, 0.0});

  auto erase = [&](const QubitPattern& d) {
    Gate g{GateKind::MCX, aux, {}, 0.0};
    g.controls.reserve(n);
    for (int q = 0; q < n; ++q) g.controls.push_back({q, d.test(q)});
    c.gates.push_back(std::move(g));
  };

  for (std::size_t s = 0; s + 1 < l; ++s) {
    const QubitPattern& cur = plan.dets[s];
    const QubitPattern& nxt = plan.dets[s + 1];
    const int k = plan.pivots[s];
    // RY(θ) moves |0> toward |1>; for a set pivot bit the mirrored angle does.
    const double angle = cur.test(k) ? -plan.angles[s] : plan.angles[s];
    c.gates.push_back({GateKind::CRY, k, {{aux, true}}, angle});
    erase(cur);
    for (int q = 0; q < n; ++q) {
      if (q != k && cur.test(q) != nxt.test(q)) {
        c.gates.push_back({GateKind::MCX, q, {{aux, true}}, 0.0});
      }
    }
  }
  erase(plan.dets[l - 1]);
  return c;
}

GateCounts gate_counts(const Circuit& c) {
  GateCounts g;
  for (const auto& gate : c.gates) {
    ++g.total;
    switch (gate.kind) {
      case GateKind::X:
        ++g.x;
        break;
      case GateKind::MCX:
        ++g.mcx;
        ++g.control_histogram[gate.controls.size()];
        if (c.uses_aux && gate.target == c.aux()) ++g.erasures;
        if (c.uses_aux && gate.controls.size() == 1 && gate.controls[0].qubit == c.aux()) {
          ++g.fanout;
        }
        break;
      case GateKind::CRY:
        ++g.cry;
        ++g.control_histogram[gate.controls.size()];
        break;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

void check_gate(const Gate& g, int nq) {
  auto bad = [nq](int q) { return q < 0 || q >= nq; };
  if (bad(g.target)) throw DomainError("gate target outside the register");
  for (const auto& ctl : g.controls) {
    if (bad(ctl.qubit) || ctl.qubit == g.target) {
      throw DomainError("gate control outside the register or equal to the target");
    }
  }
  if (g.kind == GateKind::X && !g.controls.empty()) throw DomainError("X gate with controls");
  if (g.kind == GateKind::CRY && g.controls.size() != 1) {
    throw DomainError("CRY needs exactly one control");
  }
}

bool controls_hold(const QubitPattern& p, const std::vector<Control>& controls) {
  for (const auto& c : controls) {
    if (p.test(c.qubit) != c.on_one) return false;
  }
  return true;
}

}  // namespace

std::vector<double> simulate(const Circuit& c) { return simulate(c, GateObserver{}); }

std::vector<double> simulate(const Circuit& c, const GateObserver& after_gate) {
  const int nq = c.n_qubits();
  if (nq > kMaxDenseQubits) {
    const std::size_t bytes = sizeof(double) << std::min(nq, 60);
    throw SizeGuardError("dense simulation of " + std::to_string(nq) + " qubits needs " +
                             std::to_string(bytes) + " bytes",
                         bytes);
  }
  const std::uint64_t dim = std::uint64_t{1} << nq;
  std::vector<double> psi(dim, 0.0);
  psi[0] = 1.0;
  for (std::size_t gi = 0; gi < c.gates.size(); ++gi) {
    const Gate& g = c.gates[gi];
    check_gate(g, nq);
    const std::uint64_t t = std::uint64_t{1} << g.target;
    std::uint64_t cmask = 0;
    std::uint64_t cval = 0;
    for (const auto& ctl : g.controls) {
      cmask |= std::uint64_t{1} << ctl.qubit;
      if (ctl.on_one) cval |= std::uint64_t{1} << ctl.qubit;
    }
    if (g.kind == GateKind::CRY) {
      const double co = std::cos(0.5 * g.angle);
      const double si = std::sin(0.5 * g.angle);
      for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & t) || (i & cmask) != cval) continue;
        const double a0 = psi[i];
        const double a1 = psi[i | t];
        psi[i] = co * a0 - si * a1;
        psi[i | t] = si * a0 + co * a1;
      }
    } else {
      for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & t) || (i & cmask) != cval) continue;
        std::swap(psi[i], psi[i | t]);
      }
    }
    if (after_gate) after_gate(gi, psi);
  }
  return psi;
}

std::map<QubitPattern, double> simulate_sparse(const Circuit& c) {
  const int nq = c.n_qubits();
  std::map<QubitPattern, double> psi;
  psi[QubitPattern(nq)] = 1.0;
  for (const auto& g : c.gates) {
    check_gate(g, nq);
    std::map<QubitPattern, double> out;
    if (g.kind == GateKind::CRY) {
      const double co = std::cos(0.5 * g.angle);
      const double si = std::sin(0.5 * g.angle);
      for (const auto& [p, a] : psi) {
        if (!controls_hold(p, g.controls)) {
          out[p] += a;
          continue;
        }
        QubitPattern p0 = p;
        p0.set(g.target, false);
        QubitPattern p1 = p;
        p1.set(g.target, true);
        if (!p.test(g.target)) {
          out[p0] += co * a;
          out[p1] += si * a;
        } else {
          out[p0] += -si * a;
          out[p1] += co * a;
        }
      }
    } else {
      for (const auto& [p, a] : psi) {
        QubitPattern q = p;
        if (controls_hold(p, g.controls)) q.flip(g.target);
        out[q] += a;
      }
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
    psi = std::move(out);
  }
  return psi;
}

double fidelity(std::span<const double> state, const Wavefunction& target, int norb) {
  const int n = 2 * norb;
  const std::size_t with_aux = n + 1 <= 63 ? (std::size_t{1} << (n + 1)) : 0;
  const std::size_t without = n <= 63 ? (std::size_t{1} << n) : 0;
  if (state.size() != with_aux && state.size() != without) {
    throw DomainError("fidelity: state dimension does not match 2 * norb (+1) qubits");
  }
  double amp = 0.0;
  double n2 = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const auto idx = QubitPattern::from_determinant(target.dets[i], norb).index();
    amp += target.coeffs[i] * state[idx];
    n2 += target.coeffs[i] * target.coeffs[i];
  }
  return amp * amp / n2;
}

double fidelity(const std::map<QubitPattern, double>& state, const Wavefunction& target,
                int norb) {
  double amp = 0.0;
  double n2 = 0.0;
  const int width = state.empty() ? 2 * norb : state.begin()->first.size();
  if (width != 2 * norb && width != 2 * norb + 1) {
    throw DomainError("fidelity: state width does not match 2 * norb (+1) qubits");
  }
  for (std::size_t i = 0; i < target.size(); ++i) {
    const auto p = QubitPattern::from_determinant(target.dets[i], norb).widened(width);
    const auto it = state.find(p);
    if (it != state.end()) amp += target.coeffs[i] * it->second;
    n2 += target.coeffs[i] * target.coeffs[i];
  }
  return amp * amp / n2;
}

double aux_leakage(std::span<const double> state, const Circuit& c) {
  if (!c.uses_aux) return 0.0;
  const std::uint64_t bit = std::uint64_t{1} << c.aux();
  double worst = 0.0;
  for (std::uint64_t i = 0; i < state.size(); ++i) {
    if (i & bit) worst = std::max(worst, std::abs(state[i]));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Text format

void write_circuit(std::ostream& out, const Circuit& c) {
  out << "qubits " << c.n_qubits() << ", aux ";
  if (c.uses_aux) {
    out << c.aux();
  } else {
    out << "none";
  }
  out << "\n";
  char buf[40];
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::X:
        out << "X " << g.target << "\n";
        break;
      case GateKind::MCX:
        out << "MCX";
        for (const auto& ctl : g.controls) out << ' ' << ctl.qubit << (ctl.on_one ? ":+" : ":-");
        out << " -> " << g.target << "\n";
        break;
      case GateKind::CRY:
        std::snprintf(buf, sizeof buf, "%.17g", g.angle);
        out << "CRY " << buf << ' ' << g.controls.at(0).qubit << " -> " << g.target << "\n";
        break;
    }
  }
}

std::string to_text(const Circuit& c) {
  std::ostringstream ss;
  write_circuit(ss, c);
  return ss.str();
}

namespace {

int parse_int(const std::string& tok, std::size_t line) {
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (tok.empty() || *end != '\0') throw ParseError("expected an integer, got '" + tok + "'", line);
  return static_cast<int>(v);
}

}  // namespace

Circuit parse_circuit(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  Circuit c;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::string op;
    ss >> op;
    if (!header) {
      // qubits N, aux A|none
      std::string nq;
      std::string auxkw;
      std::string aux;
      if (op != "qubits" || !(ss >> nq >> auxkw >> aux) || auxkw != "aux" || nq.empty() ||
          nq.back() != ',') {
        throw ParseError("expected header 'qubits N, aux A'", lineno);
      }
      nq.pop_back();
      const int total = parse_int(nq, lineno);
      if (aux == "none") {
        c.n_system = total;
        c.uses_aux = false;
      } else {
        c.n_system = parse_int(aux, lineno);
        c.uses_aux = true;
        if (c.n_system + 1 != total) throw ParseError("aux index must equal qubits - 1", lineno);
      }
      header = true;
      continue;
    }
    std::vector<std::string> toks;
    for (std::string t; ss >> t;) toks.push_back(t);
    Gate g;
    if (op == "X") {
      if (toks.size() != 1) throw ParseError("expected 'X q'", lineno);
      g.kind = GateKind::X;
      g.target = parse_int(toks[0], lineno);
    } else if (op == "MCX") {
      if (toks.size() < 2 || toks[toks.size() - 2] != "->") {
        throw ParseError("expected 'MCX c:+ ... -> t'", lineno);
      }
      g.kind = GateKind::MCX;
      g.target = parse_int(toks.back(), lineno);
      for (std::size_t i = 0; i + 2 < toks.size(); ++i) {
        const auto& t = toks[i];
        if (t.size() < 3 || t[t.size() - 2] != ':' || (t.back() != '+' && t.back() != '-')) {
          throw ParseError("bad control '" + t + "'", lineno);
        }
        g.controls.push_back({parse_int(t.substr(0, t.size() - 2), lineno), t.back() == '+'});
      }
    } else if (op == "CRY") {
      if (toks.size() != 4 || toks[2] != "->") throw ParseError("expected 'CRY θ c -> t'", lineno);
      g.kind = GateKind::CRY;
      char* end = nullptr;
      g.angle = std::strtod(toks[0].c_str(), &end);
      if (*end != '\0') throw ParseError("bad angle '" + toks[0] + "'", lineno);
      g.controls.push_back({parse_int(toks[1], lineno), true});
      g.target = parse_int(toks[3], lineno);
    } else {
      throw ParseError("unknown gate '" + op + "'", lineno);
    }
    try {
      check_gate(g, c.n_qubits());
    } catch (const DomainError& e) {
      throw ParseError(e.what(), lineno);
    }
    c.gates.push_back(std::move(g));
  }
  if (!header) throw ParseError("empty circuit file", lineno);
  return c;
}

}  // namespace asciprep
