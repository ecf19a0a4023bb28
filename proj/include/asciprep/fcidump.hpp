// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>

#include "asciprep/hamiltonian.hpp"

namespace asciprep {

/**
 * Reads a spin-restricted FCIDUMP.
 *
 * Header "&FCI NORB=n,NELEC=m,MS2=s ..." ending with "&END", "/" or "&".
 * Records "value i j k l" (1-based, chemists' notation); "value i j 0 0" is
 * h_ij, "value 0 0 0 0" the core energy, "value i 0 0 0" (orbital energies)
 * is ignored. Symmetry-related records must agree within 1e-12.
 * Throws ParseError with the offending line number.
 */
[[nodiscard]] IntegralModel parse_fcidump(std::istream& in);
[[nodiscard]] IntegralModel read_fcidump(const std::string& path);

/// Writes unique nonzero integrals with 17 significant digits (exact round trip).
void write_fcidump(std::ostream& out, const IntegralModel& model);
void write_fcidump(const std::string& path, const IntegralModel& model);

}  // namespace asciprep
