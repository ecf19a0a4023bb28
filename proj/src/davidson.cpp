// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "asciprep/davidson.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "asciprep/errors.hpp"

namespace asciprep {
namespace {

using Vec = Eigen::VectorXd;
using MapC = Eigen::Map<const Vec>;

constexpr double kDenominatorFloor = 1e-8;

// Deterministic perturbation in [-1, 1) (splitmix64 on the index).
double noise(std::uint64_t i) {
  std::uint64_t z = i + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-52 - 1.0;
}

Vec apply_op(const LinearOperator& op, const Vec& x) {
  Vec y = Vec::Zero(x.size());
  op(std::span<const double>(x.data(), x.size()), std::span<double>(y.data(), y.size()));
  return y;
}

EigenPair finish(double value, Vec x, double residual, int iterations) {
  EigenPair out;
  out.value = value;
  out.vector.assign(x.data(), x.data() + x.size());
  fix_sign(out.vector);
  out.residual = residual;
  out.iterations = iterations;
  return out;
}

EigenPair dense_solve(const LinearOperator& op, std::size_t n) {
  Eigen::MatrixXd a(n, n);
  Vec e = Vec::Zero(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    a.col(j) = apply_op(op, e);
    e[j] = 0.0;
  }
  a = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const Vec x = es.eigenvectors().col(0);
  const double value = es.eigenvalues()[0];
  const double residual = (a * x - value * x).norm();
  return finish(value, x, residual, static_cast<int>(n));
}

// Orthogonalizes t against the columns of v (twice, modified Gram–Schmidt).
double orthogonalize(const Eigen::MatrixXd& v, int k, Vec& t) {
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < k; ++j) t -= v.col(j).dot(t) * v.col(j);
  }
  return t.norm();
}

}  // namespace

void fix_sign(std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (!v.empty() && v[best] < 0) {
    for (double& x : v) x = -x;
  }
}

EigenPair davidson(const LinearOperator& op, std::span<const double> diagonal,
                   std::vector<double> guess, const DavidsonOptions& opts) {
  const std::size_t n = diagonal.size();
  if (n == 0) throw DomainError("davidson: empty space");
  if (n <= static_cast<std::size_t>(opts.dense_threshold)) return dense_solve(op, n);

  Vec x0(n);
  if (guess.size() == n) {
    x0 = Eigen::Map<const Vec>(guess.data(), n);
    if (x0.norm() == 0.0) throw DomainError("davidson: zero initial guess");
    x0.normalize();
    // A symmetric guess would otherwise keep the search inside one symmetry block.
    Vec p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = noise(i);
    x0 += 1e-4 * p.normalized();
  } else {
    const auto it = std::min_element(diagonal.begin(), diagonal.end());
    const auto k = static_cast<std::size_t>(it - diagonal.begin());
    for (std::size_t i = 0; i < n; ++i) x0[i] = 1e-3 * noise(i);
    x0[k] += 1.0;
  }
  if (x0.norm() == 0.0) throw DomainError("davidson: zero initial guess");
  x0.normalize();

  const int m = std::max(2, std::min<int>(opts.max_subspace, static_cast<int>(n)));
  Eigen::MatrixXd v(n, m);
  Eigen::MatrixXd av(n, m);
  Eigen::MatrixXd sub = Eigen::MatrixXd::Zero(m, m);
  v.col(0) = x0;
  av.col(0) = apply_op(op, x0);
  int k = 1;
  sub(0, 0) = x0.dot(av.col(0));

  const MapC d(diagonal.data(), n);
  double best_value = sub(0, 0);
  double best_res = std::numeric_limits<double>::infinity();
  Vec best_x = x0;

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub.topLeftCorner(k, k));
    const double theta = es.eigenvalues()[0];
    const Vec y = es.eigenvectors().col(0);
    Vec x = v.leftCols(k) * y;
    Vec ax = av.leftCols(k) * y;
    const double xn = x.norm();
    x /= xn;
    ax /= xn;
    Vec r = ax - theta * x;
    const double res = r.norm();
    if (res < best_res) {
      best_res = res;
      best_value = theta;
      best_x = x;
    }
    if (res <= opts.tol) return finish(theta, x, res, iter);

    Vec t(n);
    for (std::size_t i = 0; i < n; ++i) {
      double den = d[i] - theta;
      if (std::abs(den) < kDenominatorFloor) den = den < 0 ? -kDenominatorFloor : kDenominatorFloor;
      t[i] = -r[i] / den;
    }

    if (k == m) {
      // Restart from the current Ritz vector.
      v.col(0) = x;
      av.col(0) = ax;
      sub(0, 0) = theta;
      k = 1;
    }
    double tn = orthogonalize(v, k, t);
    if (tn < 1e-12 || !std::isfinite(tn)) {
      t = r;
      tn = orthogonalize(v, k, t);
    }
    if (tn < 1e-14) {
      // Subspace is invariant: x is exact up to round-off.
      return finish(theta, x, res, iter);
    }
    t /= tn;
    v.col(k) = t;
    av.col(k) = apply_op(op, t);
    for (int j = 0; j <= k; ++j) {
      const double s = v.col(j).dot(av.col(k));
      sub(j, k) = s;
      sub(k, j) = s;
    }
    ++k;
  }
  std::vector<double> bx(best_x.data(), best_x.data() + n);
  throw ConvergenceError("davidson did not converge (residual " + std::to_string(best_res) + ")",
                         best_value, best_res, std::move(bx));
}

}  // namespace asciprep
