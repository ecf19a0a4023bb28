// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace asciprep {

/// Precondition violated by the caller (bad sizes, infeasible patterns, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed text input. Carries the 1-based line number (0 when unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A computation refused because it would exceed a memory/size guard.
class SizeGuardError : public std::runtime_error {
 public:
  SizeGuardError(const std::string& what, std::size_t required)
      : std::runtime_error(what), required_(required) {}
  /// Size the computation would have needed (elements or bytes, see message).
  [[nodiscard]] std::size_t required() const noexcept { return required_; }

 private:
  std::size_t required_;
};

/// Iterative eigensolver failed to reach its tolerance; keeps the best iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double energy, double residual,
                   std::vector<double> vector)
      : std::runtime_error(what),
        energy(energy),
        residual(residual),
        vector(std::move(vector)) {}

  double energy;
  double residual;
  std::vector<double> vector;
};

}  // namespace asciprep
