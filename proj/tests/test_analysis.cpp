// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "asciprep/analysis.hpp"
#include "asciprep/errors.hpp"
#include "asciprep/fcidump.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace asciprep;

namespace {

Wavefunction random_wf(int norb, int na, int nb, std::size_t count, std::mt19937_64& rng) {
  auto all = oracle::sector(norb, na, nb);
  std::shuffle(all.begin(), all.end(), rng);
  std::normal_distribution<double> nd;
  Wavefunction w;
  for (std::size_t i = 0; i < count; ++i) {
    w.dets.push_back(all[i]);
    w.coeffs.push_back(nd(rng));
  }
  w.normalize();
  return w;
}

// Brute-force (pq|rs)' = Σ u_pa u_qb u_rc u_sd (ab|cd).
double naive_rotated(const IntegralModel& m, const Eigen::MatrixXd& u, int p, int q, int r, int s) {
  const int n = m.norb();
  double acc = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) acc += u(p, a) * u(q, b) * u(r, c) * u(s, d) * m.two_body(a, b, c, d);
  return acc;
}

}  // namespace

TEST_CASE("overlaps") {
  const auto d = Determinant::from_orbitals({0}, {1});
  Wavefunction w;
  w.dets = {d};
  w.coeffs = {1.0};
  CHECK(overlap_squared(w, d) == 1.0);
  CHECK(overlap_squared(w, Determinant::from_orbitals({1}, {1})) == 0.0);

  const auto m = build_hubbard_spatial({2, 1, 1.0, 4.0, 1, 1});
  const auto ed = exact_diagonalize(m, {1, 1, std::nullopt});
  // Analytic singlet: covalent weight (1 + U/√(U²+16t²)) / 4 per covalent determinant pair.
  const double cov = 0.25 * (1.0 + 4.0 / std::sqrt(16.0 + 16.0));
  CHECK(std::abs(overlap_squared(ed.wavefunction, d) - cov) < 1e-10);
}

TEST_CASE("cumulative weights") {
  Wavefunction one;
  one.dets = {Determinant::from_orbitals({0}, {})};
  one.coeffs = {1.0};
  const auto c1 = cumulative_weights(one, 10);
  REQUIRE(c1.size() == 1);
  CHECK(c1[0].n == 1);
  CHECK(c1[0].weight == 1.0);

  Wavefunction four;
  for (int i = 0; i < 4; ++i) {
    four.dets.push_back(Determinant::from_orbitals({i}, {}));
    four.coeffs.push_back(i % 2 ? -0.5 : 0.5);
  }
  const auto c4 = cumulative_weights(four, 4);
  REQUIRE(c4.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(c4[i].weight == doctest::Approx(0.25 * (i + 1)).epsilon(1e-15));

  std::mt19937_64 rng(4);
  const auto w = random_wf(6, 2, 2, 100, rng);
  const auto cw = cumulative_weights(w, w.size());
  CHECK(std::abs(cw.back().weight - 1.0) < 1e-10);
  std::vector<double> sq;
  for (double c : w.coeffs) sq.push_back(c * c);
  std::sort(sq.begin(), sq.end(), std::greater<>());
  double acc = 0.0;
  for (std::size_t i = 0; i < sq.size(); ++i) {
    acc += sq[i];
    CHECK(std::abs(cw[i].weight - acc) < 1e-14);
  }

  const auto rep = overlap_report(w, 5);
  CHECK(rep.single_det_sq == cw[0].weight);
  std::ostringstream out;
  write_overlap_report(out, rep);
  CHECK(out.str().find("# N weight") != std::string::npos);
}

TEST_CASE("one-body density matrix") {
  SUBCASE("single determinant") {
    Wavefunction w;
    w.dets = {Determinant::from_orbitals({0, 2}, {0})};
    w.coeffs = {1.0};
    const auto g = one_rdm(w, 3).matrix;
    CHECK(g(0, 0) == 2.0);
    CHECK(g(1, 1) == 0.0);
    CHECK(g(2, 2) == 1.0);
    CHECK(g.trace() == 3.0);
    const auto no = natural_orbital_rotation({g});
    CHECK(no.occupations[0] == doctest::Approx(2.0));
    CHECK(no.occupations[1] == doctest::Approx(1.0));
    CHECK(std::abs(no.occupations[2]) < 1e-14);
    // Already diagonal: rotation is a permutation.
    CHECK((no.rotation.cwiseAbs() * Eigen::VectorXd::Ones(3) - Eigen::VectorXd::Ones(3)).norm() < 1e-14);
    CHECK(no.rotation(0, 0) == 1.0);
    CHECK(no.rotation(1, 2) == 1.0);
  }
  SUBCASE("random wavefunctions match the Fock-space oracle") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 6; ++trial) {
      const int m = 4;
      const auto w = random_wf(m, 2, 1 + trial % 2, trial < 3 ? 3 : 20, rng);
      const auto g = one_rdm(w, m).matrix;
      std::map<oracle::Bits, double> psi;
      for (std::size_t i = 0; i < w.size(); ++i) psi[oracle::to_bits(w.dets[i], m)] = w.coeffs[i];
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
          std::vector<oracle::Term> op;
          for (int s = 0; s < 2; ++s) op.push_back({1.0, {{true, p + s * m}, {false, q + s * m}}});
          double ref = 0.0;
          for (const auto& [ket, c] : psi)
            for (const auto& [bra, v] : oracle::apply(op, ket)) {
              const auto it = psi.find(bra);
              if (it != psi.end()) ref += it->second * v * c;
            }
          CHECK(std::abs(g(p, q) - ref) < 1e-12);
        }
      CHECK(std::abs(g.trace() - (w.dets[0].n_alpha() + w.dets[0].n_beta())) < 1e-12);
      const auto no = natural_orbital_rotation({g});
      const Eigen::MatrixXd d = no.rotation * g * no.rotation.transpose();
      CHECK((d - Eigen::MatrixXd(no.occupations.asDiagonal())).cwiseAbs().maxCoeff() < 1e-10);
      for (int i = 0; i < m; ++i) {
        CHECK(no.occupations[i] >= -1e-12);
        CHECK(no.occupations[i] <= 2.0 + 1e-12);
        if (i > 0) CHECK(no.occupations[i - 1] >= no.occupations[i]);
      }
    }
  }
}

TEST_CASE("identity rotation leaves the model unchanged bit for bit") {
  std::mt19937_64 rng(10);
  const auto ri = oracle::random_integrals(4, rng);
  const auto m = test_util::dense_model(ri, 0.3, 2, 2);
  const auto r = rotate_integrals(m, Eigen::MatrixXd::Identity(4, 4));
  CHECK(r.two_body_table() == m.two_body_table());
  CHECK(r.one_body_matrix() == m.one_body_matrix());
  CHECK(r.e_core() == m.e_core());
  std::ostringstream a;
  std::ostringstream b;
  write_fcidump(a, m);
  write_fcidump(b, r);
  CHECK(a.str() == b.str());
}

TEST_CASE("two-orbital rotation matches the hand expansion") {
  Eigen::MatrixXd h(2, 2);
  h << -1.0, 0.2, 0.2, -0.4;
  TwoBodyTable g(2);
  g.set(0, 0, 0, 0, 0.7);
  g.set(1, 1, 1, 1, 0.6);
  g.set(0, 0, 1, 1, 0.5);
  g.set(0, 1, 0, 1, 0.1);
  g.set(0, 0, 0, 1, 0.05);
  const IntegralModel m(h, g, 0.0, 1, 1);
  const double th = 0.37;
  const double c = std::cos(th);
  const double s = std::sin(th);
  Eigen::MatrixXd u(2, 2);
  u << c, s, -s, c;
  const auto r = rotate_integrals(m, u);
  // h'_00 = c² h00 + 2cs h01 + s² h11, h'_01 = -cs h00 + (c² - s²) h01 + cs h11.
  CHECK(std::abs(r.one_body(0, 0) - (c * c * -1.0 + 2 * c * s * 0.2 + s * s * -0.4)) < 1e-14);
  CHECK(std::abs(r.one_body(0, 1) - (-c * s * -1.0 + (c * c - s * s) * 0.2 + c * s * -0.4)) < 1e-14);
  for (auto [p, q, rr, ss] : {std::array{0, 0, 0, 0}, {0, 0, 1, 1}, {0, 1, 0, 1}, {0, 0, 0, 1},
                              {1, 1, 1, 1}, {0, 1, 1, 1}}) {
    CHECK(std::abs(r.two_body(p, q, rr, ss) - naive_rotated(m, u, p, q, rr, ss)) < 1e-13);
  }
  // (00|00)' written out for the first row (c, s).
  const double g0000 = c * c * c * c * 0.7 + s * s * s * s * 0.6 + 2 * c * c * s * s * 0.5 +
                       4 * c * c * s * s * 0.1 + 4 * c * c * c * s * 0.05;
  CHECK(std::abs(r.two_body(0, 0, 0, 0) - g0000) < 1e-14);
}

TEST_CASE("rotation preserves the spectrum") {
  const auto two = test_util::two_site_integrals(1.0, 4.0);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 3; ++trial) {
    const auto u = test_util::random_orthogonal(2, rng);
    const auto r = rotate_integrals(two, u);
    CHECK(std::abs(exact_diagonalize(r, {1, 1, std::nullopt}).energy -
                   test_util::two_site_energy(1.0, 4.0)) < 1e-8);
  }
  const auto ri = oracle::random_integrals(4, rng);
  const auto m = test_util::dense_model(ri, 0.0, 2, 2);
  const double e0 = exact_diagonalize(m, {2, 2, std::nullopt}).energy;
  const auto w = random_wf(4, 2, 2, 10, rng);
  const auto no = natural_orbital_rotation(one_rdm(w, 4));
  const auto r = rotate_integrals(m, no.rotation);
  CHECK(std::abs(exact_diagonalize(r, {2, 2, std::nullopt}).energy - e0) < 1e-8);
  const auto spatial = build_hubbard_spatial({2, 2, 1.0, 4.0, 2, 2});
  const auto r2 = rotate_integrals(spatial, test_util::random_orthogonal(4, rng));
  CHECK(std::abs(exact_diagonalize(r2, {2, 2, std::nullopt}).energy -
                 exact_diagonalize(spatial, {2, 2, std::nullopt}).energy) < 1e-8);
}

TEST_CASE("rotation input checks") {
  const auto two = test_util::two_site_integrals(1.0, 4.0);
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.1, 0.0, 1.0;
  CHECK_THROWS_AS((void)rotate_integrals(two, bad), DomainError);
  CHECK_THROWS_AS((void)rotate_integrals(two, Eigen::MatrixXd::Identity(3, 3)), DomainError);
  const auto pw = build_hubbard_planewave({2, 2, 1.0, 4.0, 1, 1});
  CHECK_THROWS_AS((void)rotate_integrals(pw, Eigen::MatrixXd::Identity(4, 4)), DomainError);
}

TEST_CASE("overlap extrapolation") {
  const auto hand = extrapolate_overlap({{-0.2, 0.8}, {-0.1, 0.9}});
  CHECK(std::abs(hand.intercept - 1.0) < 1e-14);
  const auto exact = extrapolate_overlap({{-1.0, 0.5}, {-0.5, 0.625}, {0.0, 0.75}});
  CHECK(exact.intercept == 0.75);
  CHECK(exact.residual == 0.0);
  CHECK_THROWS_AS((void)extrapolate_overlap({{-1.0, 0.5}}), DomainError);
  CHECK_THROWS_AS((void)extrapolate_overlap({{-1.0, 0.5}, {-1.0, 0.6}}), DomainError);

  std::mt19937_64 rng(99);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<std::pair<double, double>> pts;
  double sxx = 0.0;
  double mx = 0.0;
  for (int i = 0; i < 40; ++i) mx += -0.02 * i / 40.0;
  for (int i = 0; i < 40; ++i) {
    const double x = -0.02 * i;
    pts.emplace_back(x, 0.6 - 3.0 * x + noise(rng));
    sxx += (x - mx) * (x - mx);
  }
  const auto fit = extrapolate_overlap(pts);
  // σ(intercept) = σ sqrt(1/n + x̄²/Sxx)
  const double sigma = 0.01 * std::sqrt(1.0 / 40 + mx * mx / sxx);
  CHECK(std::abs(fit.intercept - 0.6) < 3 * sigma);
}

TEST_CASE("matrix triplets") {
  Eigen::MatrixXd m(2, 2);
  m << 1.5, 0.0, 0.0, -2.0;
  std::ostringstream out;
  write_matrix_triplets(out, m);
  CHECK(out.str() == "# rows 2 cols 2\n# i j value\n0 0 1.5\n1 1 -2\n");
}
