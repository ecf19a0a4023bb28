// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "asciprep/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"asciprep: selected CI ground states and multi-determinant state preparation"};
  app.footer("Commands:\n"
             "  run     ASCI or exact ground state; writes iterations.log, wavefunction.txt,\n"
             "          overlap.txt, summary.txt\n"
             "  prep    top-L state-preparation circuit; writes circuit.txt, prep_report.txt\n"
             "  rotate  natural-orbital (or random) rotation; writes rotated.fcidump,\n"
             "          rotation.txt, rotate_report.txt\n"
             "  report  overlaps, natural occupations, optional exact comparison; writes\n"
             "          report.txt, rdm.txt\n\n"
             "Exit codes: 0 ok, 2 config error, 3 IO error, 4 solver failure, 5 size guard.\n\n" +
             asciprep::cli::config_reference());

  std::string command;
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "run | prep | rotate | report")
      ->required()
      ->check(CLI::IsMember({"run", "prep", "rotate", "report"}));
  app.add_option("--config", config, "INI configuration file")->required();
  app.add_option("--out", out, "output directory (overrides [output] dir)");
  app.add_option("--seed", seed, "seed for randomized generators (rotate basis = random)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return asciprep::cli::kExitConfig;
  }
  return asciprep::cli::run_command(command, config, out, seed, std::cout, std::cerr);
}
