// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file cli.hpp
 * @brief Batch front end: INI run configuration, wavefunction artifacts and
 *        the run / prep / rotate / report commands.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "asciprep/hamiltonian.hpp"
#include "asciprep/solver.hpp"

namespace asciprep::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitIo = 3,
  kExitSolver = 4,
  kExitSizeGuard = 5,
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind { none, fcidump, hubbard };
enum class Basis { spatial, planewave };
enum class Method { asci, exact };
enum class Verify { automatic, dense, none };
enum class RotationKind { natural, random };

struct RunConfig {
  // [model]
  ModelKind model = ModelKind::none;
  std::string fcidump;  ///< resolved path
  Basis basis = Basis::spatial;
  LatticeSpec lattice;
  std::optional<int> n_alpha;  ///< overrides the FCIDUMP header
  std::optional<int> n_beta;

  // [sector]
  std::optional<MomentumLabel> sector;

  // [asci]
  Method method = Method::asci;
  PatternKind initial = PatternKind::aufbau;
  std::string initial_det;
  AsciConfig asci;
  std::size_t space_cap = 5'000'000;

  // [output]
  std::string out_dir = "asciprep-out";
  std::size_t top_k = 0;       ///< determinants kept in wavefunction.txt, 0 = all
  std::size_t overlap_n = 100;

  // [prep]
  std::string prep_input;  ///< empty: <out>/wavefunction.txt
  std::size_t prep_l = 16;
  bool prep_hamming = true;
  Verify prep_verify = Verify::automatic;

  // [rotate]
  std::string rotate_input;
  RotationKind rotation = RotationKind::natural;
  bool rotate_check = true;

  // [report]
  std::string report_input;
  bool report_exact = false;

  std::uint64_t seed = 0;
};

/// Parses INI text. Relative paths are resolved against base_dir. Unknown
/// sections or keys and out-of-range values throw ConfigError.
[[nodiscard]] RunConfig parse_config(std::istream& in, const std::string& base_dir = ".");
/// Reads and parses a config file; IoError when it cannot be opened.
[[nodiscard]] RunConfig load_config(const std::string& path);

/// Every resolved setting as sorted "section.key = value" lines.
[[nodiscard]] std::string canonical_text(const RunConfig& cfg);

/// Reference of all keys with defaults, for --help.
[[nodiscard]] std::string config_reference();

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;

/// 64-bit FNV-1a, continuing from h.
[[nodiscard]] std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = kFnvOffset);
[[nodiscard]] std::string hex64(std::uint64_t h);

/// Builds the model described by [model]; ConfigError when there is none.
[[nodiscard]] IntegralModel build_model(const RunConfig& cfg);

struct WavefunctionArtifact {
  Wavefunction wf;  ///< coefficients as written (the norm is below 1 after truncation)
  int norb = 0;
  int n_alpha = 0;
  int n_beta = 0;
  std::string config_hash;
};

/// Writes the first top_k determinants (0 = all) without renormalizing.
void write_wavefunction(std::ostream& out, const Wavefunction& wf, int norb,
                        std::string_view config_hash, std::size_t top_k = 0);
[[nodiscard]] WavefunctionArtifact parse_wavefunction(std::istream& in);
[[nodiscard]] WavefunctionArtifact read_wavefunction(const std::string& path);

/// Named file contents produced by a command, written only after it succeeds.
struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;
  int status = kExitOk;  ///< nonzero when a post-condition check failed
  void add(std::string name, std::string content) {
    files.emplace_back(std::move(name), std::move(content));
  }
};

[[nodiscard]] Artifacts cmd_run(const RunConfig& cfg);
[[nodiscard]] Artifacts cmd_prep(const RunConfig& cfg);
[[nodiscard]] Artifacts cmd_rotate(const RunConfig& cfg);
[[nodiscard]] Artifacts cmd_report(const RunConfig& cfg);

/// Creates dir and writes each file through a temporary and a rename.
void write_artifacts(const std::string& dir, const Artifacts& artifacts);

/**
 * Runs one command end to end and maps failures to exit codes: config
 * problems 2, unreadable or malformed input files 3, solver failures 4,
 * refused sizes 5. Messages go to err; nothing is written on failure.
 */
[[nodiscard]] int run_command(std::string_view command, const std::string& config_path,
                              const std::optional<std::string>& out_dir,
                              const std::optional<std::uint64_t>& seed, std::ostream& log,
                              std::ostream& err);

}  // namespace asciprep::cli
