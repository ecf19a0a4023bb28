// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "asciprep/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "asciprep/errors.hpp"

namespace asciprep {

namespace {

void check_compatible(const Wavefunction& a, const Wavefunction& b) {
  if (a.size() == 0 || b.size() == 0) return;
  const auto& x = a.dets.front();
  const auto& y = b.dets.front();
  if (x.n_alpha() != y.n_alpha() || x.n_beta() != y.n_beta()) {
    throw DomainError("overlap between different particle-number sectors");
  }
}

}  // namespace

double overlap_squared(const Wavefunction& wf, const Wavefunction& ref) {
  check_compatible(wf, ref);
  const Wavefunction& small = wf.size() <= ref.size() ? wf : ref;
  const Wavefunction& large = wf.size() <= ref.size() ? ref : wf;
  const DeterminantIndex idx = index_of(large.dets);
  double s = 0.0;
  for (std::size_t i = 0; i < small.size(); ++i) {
    const auto it = idx.find(small.dets[i]);
    if (it != idx.end()) s += small.coeffs[i] * large.coeffs[it->second];
  }
  return std::min(1.0, s * s);
}

double overlap_squared(const Wavefunction& wf, const Determinant& ref) {
  Wavefunction r;
  r.dets = {ref};
  r.coeffs = {1.0};
  return overlap_squared(wf, r);
}

std::vector<WeightPoint> cumulative_weights(const Wavefunction& wf, std::size_t n_max) {
  Wavefunction w = wf;
  w.canonicalize();
  const std::size_t n = std::min(n_max, w.size());
  std::vector<WeightPoint> out;
  out.reserve(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += w.coeffs[i] * w.coeffs[i];
    out.push_back({i + 1, acc});
  }
  return out;
}

OverlapReport overlap_report(const Wavefunction& wf, std::size_t n_max) {
  OverlapReport r;
  r.cumulative = cumulative_weights(wf, n_max);
  if (!r.cumulative.empty()) {
    Wavefunction w = wf;
    w.canonicalize();
    r.reference = {w.dets.front()};
    r.single_det_sq = r.cumulative.front().weight;
  }
  return r;
}

void write_overlap_report(std::ostream& out, const OverlapReport& report) {
  out << "# single_det_sq " << std::to_string(report.single_det_sq) << "\n";
  for (const auto& d : report.reference) out << "# reference " << to_string(d) << "\n";
  out << "# N weight\n";
  char buf[64];
  for (const auto& p : report.cumulative) {
    std::snprintf(buf, sizeof buf, "%zu %.17g\n", p.n, p.weight);
    out << buf;
  }
}

OneRdm one_rdm(const Wavefunction& wf, int norb) {
  OneRdm g{Eigen::MatrixXd::Zero(norb, norb)};
  const DeterminantIndex idx = index_of(wf.dets);
  for (std::size_t j = 0; j < wf.size(); ++j) {
    const Determinant& ket = wf.dets[j];
    check_within(ket, norb);
    const double cj = wf.coeffs[j];
    for (Spin s : {Spin::alpha, Spin::beta}) {
      const SpinString& occ = ket.spin(s);
      occ.for_each_set([&](int q) {
        g.matrix(q, q) += cj * cj;
        for (int p = 0; p < norb; ++p) {
          if (occ.test(p)) continue;
          Determinant bra = ket;
          bra.spin(s).reset(q);
          bra.spin(s).set(p);
          const auto it = idx.find(bra);
          if (it == idx.end()) continue;
          // <bra| a+_p a_q |ket> = phase
          g.matrix(p, q) += wf.coeffs[it->second] * cj * single_phase(occ, q, p);
        }
      });
    }
  }
  return g;
}

NaturalOrbitals natural_orbital_rotation(const OneRdm& gamma) {
  const Eigen::MatrixXd sym = 0.5 * (gamma.matrix + gamma.matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const auto& vals = es.eigenvalues();
  Eigen::MatrixXd vecs = es.eigenvectors();
  const int n = static_cast<int>(vals.size());

  auto first_nonzero = [&](int c) {
    for (int i = 0; i < n; ++i) {
      if (std::abs(vecs(i, c)) > 1e-12) return i;
    }
    return n;
  };
  for (int c = 0; c < n; ++c) {
    Eigen::Index arg = 0;
    vecs.col(c).cwiseAbs().maxCoeff(&arg);
    if (vecs(arg, c) < 0) vecs.col(c) *= -1.0;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(vals[a] - vals[b]) > 1e-10) return vals[a] > vals[b];
    return first_nonzero(a) < first_nonzero(b);
  });

  NaturalOrbitals no;
  no.rotation.resize(n, n);
  no.occupations.resize(n);
  for (int r = 0; r < n; ++r) {
    no.rotation.row(r) = vecs.col(order[r]).transpose();
    no.occupations[r] = vals[order[r]];
  }
  return no;
}

IntegralModel rotate_integrals(const IntegralModel& model, const Eigen::MatrixXd& u) {
  if (!model.dense_capable()) {
    throw DomainError("orbital rotation is not supported for plane-wave Hubbard models");
  }
  const int n = model.norb();
  if (u.rows() != n || u.cols() != n) throw DomainError("rotation has the wrong dimension");
  if ((u * u.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10) {
    throw DomainError("rotation matrix is not orthogonal");
  }

  const Eigen::MatrixXd h = u * model.one_body_matrix() * u.transpose();
  const TwoBodyTable g = model.two_body_table();

  // Dense (pq|rs) laid out as [p][q][r][s], transformed one index at a time.
  const auto nn = static_cast<std::size_t>(n);
  const std::size_t n2 = nn * nn;
  const std::size_t n3 = n2 * nn;
  std::vector<double> a(n3 * nn);
  std::vector<double> b(n3 * nn, 0.0);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) a[p * n3 + q * n2 + r * nn + s] = g.get(p, q, r, s);

  // Each pass: out[.., x', ..] = Σ_x u(x', x) in[.., x, ..], cycling the
  // transformed index to the front so the same kernel handles every slot.
  for (int pass = 0; pass < 4; ++pass) {
    std::fill(b.begin(), b.end(), 0.0);
    // in[p][q][r][s] -> out[s'][p][q][r]
    for (std::size_t pqr = 0; pqr < n3; ++pqr) {
      const double* src = &a[pqr * nn];
      for (int s2 = 0; s2 < n; ++s2) {
        double acc = 0.0;
        for (int s = 0; s < n; ++s) acc += u(s2, s) * src[s];
        b[static_cast<std::size_t>(s2) * n3 + pqr] = acc;
      }
    }
    std::swap(a, b);
  }

  TwoBodyTable out(n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r <= p; ++r)
        for (int s = 0; s <= r; ++s) {
          // Symmetrize over the 8 permutations.
          const auto at = [&](int i, int j, int k, int l) {
            return a[i * n3 + j * n2 + k * nn + l];
          };
          // Pairwise tree sum: exact when all eight agree.
          const double v = (((at(p, q, r, s) + at(q, p, r, s)) + (at(p, q, s, r) + at(q, p, s, r))) +
                            ((at(r, s, p, q) + at(s, r, p, q)) + (at(r, s, q, p) + at(s, r, q, p)))) /
                           8.0;
          out.set(p, q, r, s, v);
        }

  Eigen::MatrixXd hs = 0.5 * (h + h.transpose());
  return IntegralModel(std::move(hs), std::move(out), model.e_core(), model.n_alpha(),
                       model.n_beta());
}

LineFit extrapolate_overlap(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw DomainError("extrapolation needs at least two points");
  const double n = static_cast<double>(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw DomainError("extrapolation needs distinct e_pt2 values");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (const auto& [x, y] : points) {
    const double r = y - (fit.intercept + fit.slope * x);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

void write_matrix_triplets(std::ostream& out, const Eigen::MatrixXd& m) {
  out << "# rows " << m.rows() << " cols " << m.cols() << "\n# i j value\n";
  char buf[80];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(i),
                    static_cast<long>(j), m(i, j));
      out << buf;
    }
  }
}

}  // namespace asciprep
