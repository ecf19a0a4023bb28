// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "asciprep/analysis.hpp"
#include "asciprep/cli.hpp"
#include "asciprep/errors.hpp"
#include "asciprep/fcidump.hpp"
#include "asciprep/stateprep.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace asciprep;
using namespace asciprep::cli;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) {
    dir = fs::temp_directory_path() / ("asciprep_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  }
  std::string read(const std::string& name) const {
    std::ifstream in(dir / name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto sp = line.find(' ');
    kv[line.substr(0, sp)] = sp == std::string::npos ? "" : line.substr(sp + 1);
  }
  return kv;
}

int invoke(const std::string& command, const std::string& config, const std::string& out,
           std::optional<std::uint64_t> seed = {}) {
  std::ostringstream log;
  std::ostringstream err;
  const int code = run_command(command, config, out, seed, log, err);
  if (code != 0) MESSAGE(command, " -> ", code, ": ", err.str());
  return code;
}

std::string dump(const IntegralModel& m) {
  std::ostringstream ss;
  write_fcidump(ss, m);
  return ss.str();
}

std::string strip_hash_line(std::string text) {
  const auto p = text.find(" ASCIPREP_HASH=");
  if (p != std::string::npos) text.erase(p, text.find('\n', p) - p + 1);
  return text;
}

const char* kTwoSite =
    "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n 4.0 1 1 1 1\n 4.0 2 2 2 2\n -1.0 2 1 0 0\n";

}  // namespace

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ull);
  CHECK(fnv1a("bar", fnv1a("foo")) == fnv1a("foobar"));
  CHECK(hex64(0xaf63dc4c8601ec8cull) == "af63dc4c8601ec8c");
}

TEST_CASE("config parsing") {
  Scratch s("config");
  s.write("m.fcidump", kTwoSite);
  std::istringstream in(
      "# comment\n; other comment\n[model]\nsource = fcidump\npath = m.fcidump\n"
      "[asci]\ntdets = 10\n[output]\ndir = res\n");
  const auto cfg = parse_config(in, s.dir.string());
  CHECK(cfg.model == ModelKind::fcidump);
  CHECK(cfg.fcidump == (s.dir / "m.fcidump").string());
  CHECK(cfg.out_dir == (s.dir / "res").string());
  CHECK(cfg.asci.tdets == 10);
  CHECK(cfg.prep_l == 16);
  CHECK(cfg.prep_verify == Verify::automatic);
  CHECK_FALSE(cfg.sector.has_value());

  auto bad = [&](const std::string& text) {
    std::istringstream ss(text);
    (void)parse_config(ss, s.dir.string());
  };
  CHECK_THROWS_AS(bad("[model]\nsource = hubbard\nlx = 4\nly = 4\nn_alpha = 2\nn_beta = 2\nfoo = 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(bad("[modle]\nsource = hubbard\n"), ConfigError);
  CHECK_THROWS_AS(bad("[model]\nsource = hubbard\nlx = 4\nly = 4\n"), ConfigError);
  CHECK_THROWS_AS(bad("[model]\nsource = hubbard\nlx = four\n"), ConfigError);
  CHECK_THROWS_AS(bad("[model]\nsource = hubbard\nlx = 4\nly = 4\nn_alpha = 2\nn_beta = 2\n"
                      "[sector]\nkx = 0\nky = 0\n"),
                  ConfigError);
  CHECK_THROWS_AS(bad("[model]\nsource = hubbard\nbasis = planewave\nlx = 4\nly = 4\nn_alpha = 2\n"
                      "n_beta = 2\n[sector]\nkx = 4\nky = 0\n"),
                  ConfigError);
  CHECK_THROWS_AS(bad("[model]\nsource = hubbard\nbasis = planewave\nlx = 4\nly = 4\nn_alpha = 2\n"
                      "n_beta = 2\n[sector]\nkx = 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(bad("[asci]\ntdets = 0\n"), ConfigError);
  CHECK_THROWS_AS(bad("[prep]\nL = 0\n"), ConfigError);
  CHECK_THROWS_AS(bad("[asci]\ninitial = user\n"), ConfigError);
  CHECK_THROWS_AS(bad("[model]\nsource = fcidump\npath = missing.fcidump\n"), IoError);
  CHECK_THROWS_AS(bad("[model]\nsource = hubbard\npath = m.fcidump\nlx = 2\nly = 1\nn_alpha = 1\n"
                      "n_beta = 1\n"),
                  ConfigError);
}

TEST_CASE("canonical text ignores layout and paths") {
  Scratch s("canon");
  s.write("m.fcidump", kTwoSite);
  std::istringstream a("[model]\nsource=fcidump\npath=m.fcidump\n[asci]\ntdets=4\n");
  std::istringstream b("[asci]\n  tdets = 4\n\n[model]\n# c\npath = ./m.fcidump\nsource = fcidump\n");
  std::istringstream c("[model]\nsource=fcidump\npath=m.fcidump\n[asci]\ntdets=5\n");
  const auto ca = canonical_text(parse_config(a, s.dir.string()));
  CHECK(ca == canonical_text(parse_config(b, s.dir.string())));
  CHECK(ca != canonical_text(parse_config(c, s.dir.string())));
}

TEST_CASE("wavefunction artifact round trip") {
  Wavefunction wf;
  wf.dets = {Determinant::from_orbitals({0, 1}, {0, 3}), Determinant::from_orbitals({0, 2}, {1, 3}),
             Determinant::from_orbitals({1, 2}, {0, 1})};
  wf.coeffs = {0.9, -0.4, 0.1 / 3.0};
  wf.energy = -1.0 / 3.0;
  std::ostringstream out;
  write_wavefunction(out, wf, 4, "0123456789abcdef");
  std::istringstream in(out.str());
  const auto a = parse_wavefunction(in);
  CHECK(a.norb == 4);
  CHECK(a.n_alpha == 2);
  CHECK(a.n_beta == 2);
  CHECK(a.config_hash == "0123456789abcdef");
  CHECK(a.wf.dets == wf.dets);
  CHECK(a.wf.coeffs == wf.coeffs);
  CHECK(a.wf.energy == wf.energy);

  std::ostringstream top;
  write_wavefunction(top, wf, 4, "x", 2);
  std::istringstream tin(top.str());
  CHECK(parse_wavefunction(tin).wf.size() == 2);

  auto bad = [](const std::string& text) {
    std::istringstream ss(text);
    (void)parse_wavefunction(ss);
  };
  CHECK_THROWS_AS(bad("norb 4\nn_alpha 1\nn_beta 0\ndeterminants 2\n1 α:0|β:\n"), ParseError);
  CHECK_THROWS_AS(bad("norb 4\nn_alpha 1\nn_beta 0\ndeterminants 1\nx α:0|β:\n"), ParseError);
  CHECK_THROWS_AS(bad("norb 4\nn_alpha 1\nn_beta 0\ndeterminants 1\n1 α:5|β:\n"), ParseError);
  CHECK_THROWS_AS(bad("norb 4\nn_alpha 1\nn_beta 0\ndeterminants 1\n1 α:0,1|β:\n"), ParseError);
  CHECK_THROWS_AS(bad("norb 4\nn_alpha 1\nn_beta 0\ndeterminants 2\n0.6 α:0|β:\n0.8 α:0|β:\n"),
                  ParseError);
  CHECK_THROWS_AS(bad("n_alpha 1\nn_beta 0\ndeterminants 0\n"), ParseError);
}

TEST_CASE("run on the two-site FCIDUMP") {
  Scratch s("twosite");
  s.write("m.fcidump", kTwoSite);
  const auto cfg = s.write("c.ini", "[model]\nsource = fcidump\npath = m.fcidump\n[asci]\ntdets = 4\n");
  const auto out = (s.dir / "out").string();
  REQUIRE(invoke("run", cfg, out) == 0);
  const auto summary = key_values(s.read("out/summary.txt"));
  CHECK(std::abs(std::stod(summary.at("e_var")) - test_util::two_site_energy(1.0, 4.0)) < 1e-8);
  CHECK(std::abs(std::stod(summary.at("e_var")) + 0.82842712) < 1e-8);
  CHECK(summary.at("space_size") == "4");

  // Every artifact carries the same hash; reruns are byte-identical.
  std::map<std::string, std::string> first;
  for (const auto& f : fs::directory_iterator(s.dir / "out")) {
    first[f.path().filename().string()] = s.read("out/" + f.path().filename().string());
  }
  CHECK(first.size() == 4);
  const auto hash = first.at("summary.txt").substr(first.at("summary.txt").find("config_hash"), 28);
  for (const auto& [name, text] : first) CHECK_MESSAGE(text.find(hash) != std::string::npos, name);
  REQUIRE(invoke("run", cfg, out) == 0);
  for (const auto& [name, text] : first) CHECK(s.read("out/" + name) == text);

  // A different config changes the hash.
  const auto cfg2 = s.write("c2.ini", "[model]\nsource = fcidump\npath = m.fcidump\n[asci]\ntdets = 3\n");
  REQUIRE(invoke("run", cfg2, (s.dir / "out2").string()) == 0);
  CHECK(s.read("out2/summary.txt").find(hash) == std::string::npos);

  // Exact method gives the same energy.
  const auto cfg3 = s.write("c3.ini", "[model]\nsource = fcidump\npath = m.fcidump\n[asci]\nmethod = exact\n");
  REQUIRE(invoke("run", cfg3, (s.dir / "out3").string()) == 0);
  CHECK(std::abs(std::stod(key_values(s.read("out3/summary.txt")).at("e_var")) -
                 test_util::two_site_energy(1.0, 4.0)) < 1e-10);
}

TEST_CASE("run on the 4x4 zero-momentum sector reaches all 912 determinants") {
  Scratch s("sector912");
  const auto cfg = s.write("c.ini",
                           "[model]\nsource = hubbard\nbasis = planewave\nlx = 4\nly = 4\nu = 4\n"
                           "n_alpha = 2\nn_beta = 2\n[sector]\nkx = 0\nky = 0\n[asci]\ntdets = 912\n");
  REQUIRE(invoke("run", cfg, (s.dir / "out").string()) == 0);
  const auto summary = key_values(s.read("out/summary.txt"));
  CHECK(summary.at("space_size") == "912");
  const auto ed = exact_diagonalize(build_hubbard_planewave({4, 4, 1.0, 4.0, 2, 2}),
                                    {2, 2, MomentumLabel{0, 0}});
  CHECK(std::abs(std::stod(summary.at("e_var")) - ed.energy) < 1e-8);
  const auto ol = s.read("out/overlap.txt");
  CHECK(ol.find("config_hash") != std::string::npos);
}

TEST_CASE("failures map to exit codes and leave no artifacts") {
  Scratch s("codes");
  const auto out = (s.dir / "out").string();
  CHECK(invoke("run", (s.dir / "none.ini").string(), out) == kExitIo);
  CHECK(invoke("run", s.write("a.ini", "[model]\nsource = fcidump\npath = gone.fcidump\n"), out) ==
        kExitIo);
  CHECK(invoke("run", s.write("b.ini", "[model]\nsource = hubbard\n"), out) == kExitConfig);
  s.write("broken.fcidump", "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n 4.0 1 1 x 1\n");
  CHECK(invoke("run", s.write("c.ini", "[model]\nsource = fcidump\npath = broken.fcidump\n"), out) ==
        kExitIo);
  CHECK(invoke("run",
               s.write("d.ini", "[model]\nsource = hubbard\nlx = 6\nly = 6\nn_alpha = 18\n"
                                "n_beta = 18\n[asci]\nmethod = exact\n"),
               out) == kExitSizeGuard);
  CHECK(invoke("run",
               s.write("e.ini", "[model]\nsource = hubbard\nlx = 3\nly = 3\nn_alpha = 2\n"
                                "n_beta = 2\n[asci]\ninitial = afm\n"),
               out) == kExitConfig);
  CHECK(invoke("rotate",
               s.write("f.ini", "[model]\nsource = hubbard\nbasis = planewave\nlx = 2\nly = 2\n"
                                "n_alpha = 1\nn_beta = 1\n"),
               out) == kExitConfig);
  CHECK(invoke("prep", s.write("g.ini", "[prep]\nL = 2\n"), out) == kExitIo);
  CHECK(invoke("frobnicate", s.write("h.ini", ""), out) == kExitConfig);
  CHECK_FALSE(fs::exists(out));

  // A vanishing tail amplitude is a solver-side failure.
  s.write("wf.txt",
          "norb 2\nn_alpha 1\nn_beta 1\ndeterminants 3\n1 α:0|β:0\n0 α:1|β:1\n0 α:0|β:1\n");
  CHECK(invoke("prep", s.write("i.ini", "[prep]\nL = 3\nwavefunction = wf.txt\n"), out) ==
        kExitSolver);
  CHECK(invoke("prep", s.write("j.ini", "[prep]\nL = 4\nwavefunction = wf.txt\n"), out) ==
        kExitConfig);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("prep from a wavefunction artifact") {
  Scratch s("prep");
  SUBCASE("L = 1 is X gates only") {
    s.write("wf.txt", "norb 3\nn_alpha 2\nn_beta 1\ndeterminants 2\n0.8 α:0,2|β:1\n-0.6 α:1,2|β:1\n");
    const auto cfg = s.write("c.ini", "[prep]\nL = 1\nwavefunction = wf.txt\n");
    REQUIRE(invoke("prep", cfg, (s.dir / "out").string()) == 0);
    const auto rep = key_values(s.read("out/prep_report.txt"));
    CHECK(rep.at("fidelity") == "1");
    CHECK(rep.at("gates_x") == "3");
    CHECK(rep.at("gates_mcx") == "0");
    CHECK(rep.at("gates_cry") == "0");
    CHECK(rep.at("aux") == "none");
    CHECK(std::stod(rep.at("truncation_weight")) == 0.8 * 0.8);
    std::istringstream circ(s.read("out/circuit.txt"));
    const auto c = parse_circuit(circ);
    CHECK(c.gates.size() == 3);
    CHECK_FALSE(c.uses_aux);
  }
  SUBCASE("L = 16 on a quarter-filled 4x4 run") {
    const auto cfg = s.write(
        "c.ini",
        "[model]\nsource = hubbard\nbasis = planewave\nlx = 4\nly = 4\nu = 4\nn_alpha = 4\n"
        "n_beta = 4\n[sector]\nkx = 0\nky = 0\n[asci]\ntdets = 200\n[prep]\nL = 16\n");
    const auto out = (s.dir / "out").string();
    REQUIRE(invoke("run", cfg, out) == 0);
    REQUIRE(invoke("prep", cfg, out) == 0);
    const auto rep = key_values(s.read("out/prep_report.txt"));
    CHECK(rep.at("qubits") == "33");
    CHECK(rep.at("simulator") == "sparse");
    CHECK(std::stod(rep.at("fidelity")) >= 1.0 - 1e-10);
    CHECK(std::stod(rep.at("aux_leakage")) <= 1e-12);
    CHECK(rep.at("gates_cry") == "15");
    CHECK(std::stoul(rep.at("gates_total")) <= 3 + (32 + 2) * 16);

    std::istringstream wf_in(s.read("out/wavefunction.txt"));
    const auto wf = parse_wavefunction(wf_in);
    CHECK(std::stod(rep.at("truncation_weight")) == cumulative_weights(wf.wf, 16).back().weight);

    // Independent check of the emitted circuit text.
    std::istringstream circ(s.read("out/circuit.txt"));
    const auto c = parse_circuit(circ);
    CHECK(fidelity(simulate_sparse(c), wf.wf.truncated(16), 16) >= 1.0 - 1e-10);

    const auto dense_cfg = s.write(
        "d.ini",
        "[model]\nsource = hubbard\nbasis = planewave\nlx = 4\nly = 4\nu = 4\nn_alpha = 4\n"
        "n_beta = 4\n[sector]\nkx = 0\nky = 0\n[asci]\ntdets = 200\n[prep]\nL = 16\n"
        "verify = dense\nwavefunction = out/wavefunction.txt\n");
    REQUIRE(invoke("prep", dense_cfg, (s.dir / "dense").string()) == 0);
    const auto unv = key_values(s.read("dense/prep_report.txt"));
    CHECK(unv.at("fidelity") == "unverified");
    const auto body = [&](const std::string& name) {
      const auto text = s.read(name);
      return text.substr(text.find("qubits"));
    };
    CHECK(body("dense/circuit.txt") == body("out/circuit.txt"));
  }
  SUBCASE("dense verification on a small model") {
    s.write("m.fcidump", kTwoSite);
    const auto cfg = s.write("c.ini",
                             "[model]\nsource = fcidump\npath = m.fcidump\n[asci]\nmethod = exact\n"
                             "[prep]\nL = 4\norder = weight\n");
    const auto out = (s.dir / "out").string();
    REQUIRE(invoke("run", cfg, out) == 0);
    REQUIRE(invoke("prep", cfg, out) == 0);
    const auto rep = key_values(s.read("out/prep_report.txt"));
    CHECK(rep.at("simulator") == "dense");
    CHECK(std::stod(rep.at("fidelity")) >= 1.0 - 1e-12);
    CHECK(rep.at("order") == "weight");
  }
}

TEST_CASE("rotate keeps the exact energy") {
  Scratch s("rotate");
  SUBCASE("two-site natural orbitals") {
    s.write("m.fcidump", kTwoSite);
    const auto cfg = s.write("c.ini", "[model]\nsource = fcidump\npath = m.fcidump\n[asci]\ntdets = 4\n");
    const auto out = (s.dir / "out").string();
    REQUIRE(invoke("run", cfg, out) == 0);
    REQUIRE(invoke("rotate", cfg, out) == 0);
    const auto rep = key_values(s.read("out/rotate_report.txt"));
    CHECK(rep.at("invariant") == "true");
    const auto rotated = read_fcidump((s.dir / "out/rotated.fcidump").string());
    CHECK(std::abs(exact_diagonalize(rotated, {1, 1, std::nullopt}).energy -
                   test_util::two_site_energy(1.0, 4.0)) < 1e-8);
    // Running on the rotated file reproduces the energy.
    const auto cfg2 = s.write("r.ini", "[model]\nsource = fcidump\npath = out/rotated.fcidump\n"
                                       "[asci]\nmethod = exact\n");
    REQUIRE(invoke("run", cfg2, (s.dir / "again").string()) == 0);
    CHECK(std::abs(std::stod(key_values(s.read("again/summary.txt")).at("e_var")) -
                   test_util::two_site_energy(1.0, 4.0)) < 1e-8);
  }
  SUBCASE("identity natural orbitals leave the FCIDUMP unchanged") {
    std::mt19937_64 rng(4);
    const auto ri = oracle::random_integrals(4, rng);
    const auto model = test_util::dense_model(ri, 0.25, 2, 1);
    s.write("m.fcidump", dump(model));
    s.write("wf.txt", "norb 4\nn_alpha 2\nn_beta 1\ndeterminants 1\n1 α:0,1|β:0\n");
    const auto cfg = s.write("c.ini", "[model]\nsource = fcidump\npath = m.fcidump\n"
                                      "[rotate]\nwavefunction = wf.txt\n");
    REQUIRE(invoke("rotate", cfg, (s.dir / "out").string()) == 0);
    CHECK(strip_hash_line(s.read("out/rotated.fcidump")) == dump(model));
  }
  SUBCASE("M = 4 random wavefunction and random basis") {
    std::mt19937_64 rng(8);
    const auto ri = oracle::random_integrals(4, rng);
    const auto model = test_util::dense_model(ri, -0.5, 2, 2);
    const auto basis = oracle::sector(4, 2, 2);
    const Eigen::MatrixXd href = oracle::matrix(
        oracle::integral_hamiltonian(ri.h, [&](int p, int q, int r, int t) { return ri.at(p, q, r, t); },
                                     -0.5),
        basis, 4);
    const double e_ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(href).eigenvalues()[0];

    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::ostringstream wf;
    wf << "norb 4\nn_alpha 2\nn_beta 2\ndeterminants 5\n";
    for (int i = 0; i < 5; ++i) wf << u(rng) << ' ' << to_string(basis[7 * i + 1]) << '\n';
    s.write("m.fcidump", dump(model));
    s.write("wf.txt", wf.str());
    for (const char* kind : {"natural", "random"}) {
      const auto cfg = s.write(std::string(kind) + ".ini",
                               std::string("[model]\nsource = fcidump\npath = m.fcidump\n"
                                           "[rotate]\nwavefunction = wf.txt\nbasis = ") +
                                   kind + "\n");
      const auto out = (s.dir / kind).string();
      REQUIRE(invoke("rotate", cfg, out, 11) == 0);
      const auto rotated = read_fcidump(out + "/rotated.fcidump");
      CHECK(std::abs(exact_diagonalize(rotated, {2, 2, std::nullopt}).energy - e_ref) < 1e-8);
      CHECK(key_values(s.read(std::string(kind) + "/rotate_report.txt")).at("invariant") == "true");
    }
    // The seed changes the random rotation.
    const auto cfg = (s.dir / "random.ini").string();
    REQUIRE(invoke("rotate", cfg, (s.dir / "seed12").string(), 12) == 0);
    CHECK(s.read("seed12/rotation.txt") != s.read("random/rotation.txt"));
  }
}

TEST_CASE("report against exact diagonalization") {
  Scratch s("report");
  const auto cfg = s.write("c.ini",
                           "[model]\nsource = hubbard\nlx = 2\nly = 2\nu = 4\nn_alpha = 2\n"
                           "n_beta = 2\n[asci]\ntdets = 10\n[report]\nexact = true\n");
  const auto out = (s.dir / "out").string();
  REQUIRE(invoke("run", cfg, out) == 0);
  REQUIRE(invoke("report", cfg, out) == 0);
  const auto rep = key_values(s.read("out/report.txt"));
  CHECK(rep.at("sector_size") == "36");
  CHECK(rep.at("exact_space_size") == "36");
  CHECK(std::stod(rep.at("overlap_with_exact")) <= 1.0 + 1e-12);
  CHECK(std::stod(rep.at("e_error")) >= -1e-10);
  double occ = 0.0;
  std::istringstream in(s.read("out/report.txt"));
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("natural_occupation ", 0) == 0) occ += std::stod(line.substr(line.rfind(' ')));
  }
  CHECK(std::abs(occ - 4.0) < 1e-8);
}
