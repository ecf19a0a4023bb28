// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "asciprep/cli.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "asciprep/analysis.hpp"
#include "asciprep/errors.hpp"
#include "asciprep/fcidump.hpp"
#include "asciprep/stateprep.hpp"

namespace asciprep::cli {
namespace {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Tracks which keys were consumed so leftovers can be reported.
class Reader {
 public:
  explicit Reader(const pt::ptree& root) : root_(root) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    const auto sec = root_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  template <typename T>
  T number(const std::string& section, const std::string& key, T fallback) {
    const auto v = raw(section, key);
    if (!v) return fallback;
    T out{};
    const auto* end = v->data() + v->size();
    const auto [ptr, ec] = std::from_chars(v->data(), end, out);
    if (ec != std::errc() || ptr != end || v->empty()) {
      throw ConfigError("[" + section + "] " + key + ": not a valid number: '" + *v + "'");
    }
    return out;
  }

  bool flag(const std::string& section, const std::string& key, bool fallback) {
    const auto v = raw(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    throw ConfigError("[" + section + "] " + key + ": expected true or false, got '" + *v + "'");
  }

  template <typename E>
  E choice(const std::string& section, const std::string& key, E fallback,
           const std::vector<std::pair<std::string, E>>& options) {
    const auto v = raw(section, key);
    if (!v) return fallback;
    for (const auto& [name, e] : options) {
      if (*v == name) return e;
    }
    std::string list;
    for (const auto& o : options) list += (list.empty() ? "" : "|") + o.first;
    throw ConfigError("[" + section + "] " + key + ": expected " + list + ", got '" + *v + "'");
  }

  void reject_unknown() const {
    for (const auto& [section, body] : root_) {
      if (body.empty() && !body.data().empty()) {
        throw ConfigError("key '" + section + "' outside any section");
      }
      for (const auto& kv : body) {
        if (!used_.count(section + "." + kv.first)) {
          throw ConfigError("unknown key [" + section + "] " + kv.first);
        }
      }
      bool known = false;
      for (const auto& u : used_) known |= u.rfind(section + ".", 0) == 0;
      if (!known) throw ConfigError("unknown section [" + section + "]");
    }
  }

 private:
  const pt::ptree& root_;
  std::set<std::string> used_;
};

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty()) return p;
  const fs::path path(p);
  return path.is_absolute() ? p : (fs::path(base) / path).lexically_normal().string();
}

template <typename T>
void require_positive(T v, const std::string& what) {
  if (!(v > 0)) throw ConfigError(what + " must be positive");
}

std::string_view name_of(ModelKind k) {
  switch (k) {
    case ModelKind::none: return "none";
    case ModelKind::fcidump: return "fcidump";
    case ModelKind::hubbard: return "hubbard";
  }
  return "?";
}

std::string_view name_of(PatternKind k) {
  switch (k) {
    case PatternKind::aufbau: return "aufbau";
    case PatternKind::afm: return "afm";
    case PatternKind::sdw: return "sdw";
    case PatternKind::user: return "user";
  }
  return "?";
}

std::string_view name_of(Verify v) {
  switch (v) {
    case Verify::automatic: return "auto";
    case Verify::dense: return "dense";
    case Verify::none: return "none";
  }
  return "?";
}

std::pair<int, int> electrons(const RunConfig& cfg, const IntegralModel& m) {
  return {cfg.n_alpha.value_or(m.n_alpha()), cfg.n_beta.value_or(m.n_beta())};
}

std::string header(std::string_view kind, std::uint64_t hash) {
  return "# asciprep " + std::string(kind) + "\n# config_hash " + hex64(hash) + "\n";
}

// Hash of the resolved config plus the bytes of every model input file.
std::uint64_t base_hash(const RunConfig& cfg, std::string_view command) {
  std::uint64_t h = fnv1a(canonical_text(cfg));
  h = fnv1a(command, h);
  if (cfg.model == ModelKind::fcidump) h = fnv1a(slurp(cfg.fcidump), h);
  return h;
}

std::string input_path(const RunConfig& cfg, const std::string& configured) {
  return configured.empty() ? (fs::path(cfg.out_dir) / "wavefunction.txt").string() : configured;
}

// Reads a wavefunction artifact; malformed content is an input error.
WavefunctionArtifact load_input(const std::string& path, std::uint64_t& hash) {
  const std::string text = slurp(path);
  hash = fnv1a(text, hash);
  std::istringstream in(text);
  try {
    return parse_wavefunction(in);
  } catch (const ParseError& e) {
    throw IoError("'" + path + "': " + e.what());
  }
}

Determinant initial_determinant(const RunConfig& cfg, const IntegralModel& m) {
  const auto [na, nb] = electrons(cfg, m);
  try {
    return pattern_determinant(cfg.initial, m, na, nb, cfg.sector, cfg.initial_det);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("initial determinant: ") + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(std::string("initial determinant: ") + e.what());
  }
}

Eigen::MatrixXd random_rotation(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::VectorXd r = qr.matrixQR().diagonal();
  for (int j = 0; j < n; ++j) {
    if (r[j] < 0) q.col(j) *= -1.0;
  }
  return q.transpose();
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(std::istream& in, const std::string& base_dir) {
  // Full-line "#" comments are accepted in addition to ";".
  std::ostringstream cleaned;
  for (std::string line; std::getline(in, line);) {
    const auto t = trim(line);
    cleaned << (t.starts_with('#') ? "" : line) << '\n';
  }
  pt::ptree root;
  try {
    std::istringstream ss(cleaned.str());
    pt::read_ini(ss, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  Reader r(root);
  RunConfig c;

  c.model = r.choice<ModelKind>("model", "source", ModelKind::none,
                                {{"fcidump", ModelKind::fcidump}, {"hubbard", ModelKind::hubbard}});
  const auto path = r.raw("model", "path");
  c.basis = r.choice<Basis>("model", "basis", Basis::spatial,
                            {{"spatial", Basis::spatial}, {"planewave", Basis::planewave}});
  c.lattice.lx = r.number<int>("model", "lx", 0);
  c.lattice.ly = r.number<int>("model", "ly", 0);
  c.lattice.t = r.number<double>("model", "t", 1.0);
  c.lattice.u = r.number<double>("model", "u", 0.0);
  if (const auto v = r.raw("model", "n_alpha")) c.n_alpha = r.number<int>("model", "n_alpha", 0);
  if (const auto v = r.raw("model", "n_beta")) c.n_beta = r.number<int>("model", "n_beta", 0);

  const auto kx = r.raw("sector", "kx");
  const auto ky = r.raw("sector", "ky");
  if (kx.has_value() != ky.has_value()) throw ConfigError("[sector] needs both kx and ky");
  if (kx) c.sector = MomentumLabel{r.number<int>("sector", "kx", 0), r.number<int>("sector", "ky", 0)};

  c.method = r.choice<Method>("asci", "method", Method::asci,
                              {{"asci", Method::asci}, {"exact", Method::exact}});
  c.initial = r.choice<PatternKind>("asci", "initial", PatternKind::aufbau,
                                    {{"aufbau", PatternKind::aufbau},
                                     {"afm", PatternKind::afm},
                                     {"sdw", PatternKind::sdw},
                                     {"user", PatternKind::user}});
  c.initial_det = r.raw("asci", "determinant").value_or("");
  c.asci.tdets = r.number<std::size_t>("asci", "tdets", c.asci.tdets);
  c.asci.cdets = r.number<std::size_t>("asci", "cdets", c.asci.cdets);
  c.asci.energy_tol = r.number<double>("asci", "energy_tol", c.asci.energy_tol);
  c.asci.max_iter = r.number<int>("asci", "max_iter", c.asci.max_iter);
  c.asci.davidson_tol = r.number<double>("asci", "davidson_tol", c.asci.davidson_tol);
  c.asci.pt2_each_iteration = r.flag("asci", "pt2_each_iteration", false);
  c.space_cap = r.number<std::size_t>("asci", "space_cap", c.space_cap);

  c.out_dir = resolve(base_dir, r.raw("output", "dir").value_or(c.out_dir));
  c.top_k = r.number<std::size_t>("output", "top_k", c.top_k);
  c.overlap_n = r.number<std::size_t>("output", "overlap_n", c.overlap_n);

  c.prep_input = resolve(base_dir, r.raw("prep", "wavefunction").value_or(""));
  c.prep_l = r.number<std::size_t>("prep", "L", c.prep_l);
  c.prep_hamming = r.choice<bool>("prep", "order", true, {{"hamming", true}, {"weight", false}});
  c.prep_verify = r.choice<Verify>(
      "prep", "verify", Verify::automatic,
      {{"auto", Verify::automatic}, {"dense", Verify::dense}, {"none", Verify::none}});

  c.rotate_input = resolve(base_dir, r.raw("rotate", "wavefunction").value_or(""));
  c.rotation = r.choice<RotationKind>("rotate", "basis", RotationKind::natural,
                                      {{"natural", RotationKind::natural},
                                       {"random", RotationKind::random}});
  c.rotate_check = r.flag("rotate", "check", true);

  c.report_input = resolve(base_dir, r.raw("report", "wavefunction").value_or(""));
  c.report_exact = r.flag("report", "exact", false);

  r.reject_unknown();

  // Cross-field validation.
  if (c.model == ModelKind::fcidump) {
    if (!path || path->empty()) throw ConfigError("[model] source = fcidump needs path");
    c.fcidump = resolve(base_dir, *path);
    if (!fs::exists(c.fcidump)) throw IoError("FCIDUMP '" + c.fcidump + "' does not exist");
  } else if (path) {
    throw ConfigError("[model] path is only valid with source = fcidump");
  }
  if (c.model == ModelKind::hubbard) {
    require_positive(c.lattice.lx, "[model] lx");
    require_positive(c.lattice.ly, "[model] ly");
    if (!c.n_alpha || !c.n_beta) throw ConfigError("[model] hubbard needs n_alpha and n_beta");
    c.lattice.n_alpha = *c.n_alpha;
    c.lattice.n_beta = *c.n_beta;
    try {
      c.lattice.validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("[model] ") + e.what());
    }
  }
  if (c.n_alpha && *c.n_alpha < 0) throw ConfigError("[model] n_alpha must be >= 0");
  if (c.n_beta && *c.n_beta < 0) throw ConfigError("[model] n_beta must be >= 0");
  if (c.sector) {
    if (c.model != ModelKind::hubbard || c.basis != Basis::planewave) {
      throw ConfigError("[sector] applies to plane-wave Hubbard models only");
    }
    if (c.sector->kx < 0 || c.sector->kx >= c.lattice.lx || c.sector->ky < 0 ||
        c.sector->ky >= c.lattice.ly) {
      throw ConfigError("[sector] momentum outside the Brillouin zone");
    }
  }
  if (c.initial == PatternKind::user && c.initial_det.empty()) {
    throw ConfigError("[asci] initial = user needs determinant");
  }
  c.asci.sector = c.sector;
  try {
    c.asci.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("[asci] ") + e.what());
  }
  require_positive(c.space_cap, "[asci] space_cap");
  require_positive(c.overlap_n, "[output] overlap_n");
  require_positive(c.prep_l, "[prep] L");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  const auto base = fs::path(path).parent_path();
  return parse_config(in, base.empty() ? "." : base.string());
}

std::string canonical_text(const RunConfig& c) {
  // Paths are left out: input files enter the hash through their bytes.
  std::map<std::string, std::string> kv;
  kv["model.source"] = name_of(c.model);
  if (c.model == ModelKind::hubbard) {
    kv["model.basis"] = c.basis == Basis::spatial ? "spatial" : "planewave";
    kv["model.lx"] = std::to_string(c.lattice.lx);
    kv["model.ly"] = std::to_string(c.lattice.ly);
    kv["model.t"] = fmt(c.lattice.t);
    kv["model.u"] = fmt(c.lattice.u);
  }
  if (c.n_alpha) kv["model.n_alpha"] = std::to_string(*c.n_alpha);
  if (c.n_beta) kv["model.n_beta"] = std::to_string(*c.n_beta);
  if (c.sector) {
    kv["sector.kx"] = std::to_string(c.sector->kx);
    kv["sector.ky"] = std::to_string(c.sector->ky);
  }
  kv["asci.method"] = c.method == Method::asci ? "asci" : "exact";
  kv["asci.initial"] = name_of(c.initial);
  kv["asci.determinant"] = c.initial_det;
  kv["asci.tdets"] = std::to_string(c.asci.tdets);
  kv["asci.cdets"] = std::to_string(c.asci.cdets);
  kv["asci.energy_tol"] = fmt(c.asci.energy_tol);
  kv["asci.max_iter"] = std::to_string(c.asci.max_iter);
  kv["asci.davidson_tol"] = fmt(c.asci.davidson_tol);
  kv["asci.pt2_each_iteration"] = c.asci.pt2_each_iteration ? "true" : "false";
  kv["asci.space_cap"] = std::to_string(c.space_cap);
  kv["output.top_k"] = std::to_string(c.top_k);
  kv["output.overlap_n"] = std::to_string(c.overlap_n);
  kv["prep.L"] = std::to_string(c.prep_l);
  kv["prep.order"] = c.prep_hamming ? "hamming" : "weight";
  kv["prep.verify"] = name_of(c.prep_verify);
  kv["rotate.basis"] = c.rotation == RotationKind::natural ? "natural" : "random";
  kv["rotate.check"] = c.rotate_check ? "true" : "false";
  kv["report.exact"] = c.report_exact ? "true" : "false";
  kv["seed"] = std::to_string(c.seed);
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string config_reference() {
  return R"(Configuration file (INI; "#" or ";" starts a comment line):

[model]
  source = fcidump | hubbard       (required by run, rotate and report)
  path = FILE                      FCIDUMP, relative to the config file
  basis = spatial | planewave      hubbard basis (default spatial)
  lx, ly = INT                     periodic lattice extents
  t = 1.0, u = 0.0                 hopping and on-site repulsion
  n_alpha, n_beta = INT            required for hubbard; override the FCIDUMP header
[sector]
  kx, ky = INT                     total momentum sector (plane-wave only)
[asci]
  method = asci | exact            default asci
  initial = aufbau | afm | sdw | user   default aufbau
  determinant = a:0,1|b:0,1        used with initial = user
  tdets = 1000                     target space size
  cdets = 0                        core size, 0 = min(tdets, max(1000, tdets/10))
  energy_tol = 1e-8, max_iter = 50, davidson_tol = 1e-8
  pt2_each_iteration = false
  space_cap = 5000000              largest space enumerated for exact work
[output]
  dir = asciprep-out               overridden by --out
  top_k = 0                        determinants written to wavefunction.txt (0 = all)
  overlap_n = 100                  rows of the cumulative-weight report
[prep]
  wavefunction = FILE              default <out>/wavefunction.txt
  L = 16                           determinants in the prepared state
  order = hamming | weight         default hamming
  verify = auto | dense | none     auto: dense up to 24 qubits, sparse above
[rotate]
  wavefunction = FILE              default <out>/wavefunction.txt
  basis = natural | random         random uses --seed
  check = true                     exact energy before/after rotation
[report]
  wavefunction = FILE              default <out>/wavefunction.txt
  exact = false                    compare against exact diagonalization
)";
}

IntegralModel build_model(const RunConfig& cfg) {
  switch (cfg.model) {
    case ModelKind::none:
      throw ConfigError("this command needs a [model] section");
    case ModelKind::fcidump: {
      const std::string text = slurp(cfg.fcidump);
      std::istringstream in(text);
      try {
        return parse_fcidump(in);
      } catch (const ParseError& e) {
        throw IoError("'" + cfg.fcidump + "': " + e.what());
      }
    }
    case ModelKind::hubbard:
      try {
        return cfg.basis == Basis::spatial ? build_hubbard_spatial(cfg.lattice)
                                           : build_hubbard_planewave(cfg.lattice);
      } catch (const DomainError& e) {
        throw ConfigError(std::string("[model] ") + e.what());
      }
  }
  throw ConfigError("unknown model source");
}

void write_wavefunction(std::ostream& out, const Wavefunction& wf, int norb,
                        std::string_view config_hash, std::size_t top_k) {
  const std::size_t n = top_k == 0 ? wf.size() : std::min(top_k, wf.size());
  int na = 0;
  int nb = 0;
  if (wf.size() > 0) {
    na = wf.dets[0].n_alpha();
    nb = wf.dets[0].n_beta();
  }
  out << "# asciprep wavefunction\n# config_hash " << config_hash << "\n";
  out << "norb " << norb << "\nn_alpha " << na << "\nn_beta " << nb << "\n";
  out << "energy " << fmt(wf.energy) << "\ndeterminants " << n << "\n";
  for (std::size_t i = 0; i < n; ++i) out << fmt(wf.coeffs[i]) << ' ' << to_string(wf.dets[i]) << '\n';
}

WavefunctionArtifact parse_wavefunction(std::istream& in) {
  WavefunctionArtifact a;
  std::map<std::string, std::string> head;
  std::size_t expected = 0;
  bool body = false;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.starts_with('#')) {
      if (t.starts_with("# config_hash ")) a.config_hash = trim(t.substr(14));
      continue;
    }
    std::istringstream ss(t);
    std::string first;
    std::string second;
    ss >> first >> second;
    if (!body) {
      if (second.empty()) throw ParseError("expected 'key value'", lineno);
      head[first] = second;
      if (first == "determinants") {
        body = true;
        const auto [p, ec] = std::from_chars(second.data(), second.data() + second.size(), expected);
        if (ec != std::errc() || p != second.data() + second.size()) {
          throw ParseError("bad determinant count", lineno);
        }
      }
      continue;
    }
    double c = 0.0;
    const auto [p, ec] = std::from_chars(first.data(), first.data() + first.size(), c);
    if (ec != std::errc() || p != first.data() + first.size() || second.empty()) {
      throw ParseError("expected 'coefficient determinant'", lineno);
    }
    std::string rest;
    if (ss >> rest) throw ParseError("trailing text after determinant", lineno);
    try {
      a.wf.dets.push_back(parse_determinant(second));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
    a.wf.coeffs.push_back(c);
  }
  auto int_key = [&](const char* key) {
    const auto it = head.find(key);
    if (it == head.end()) throw ParseError(std::string("missing '") + key + "'", 0);
    int v = 0;
    const auto [p, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (ec != std::errc() || p != it->second.data() + it->second.size()) {
      throw ParseError(std::string("bad '") + key + "'", 0);
    }
    return v;
  };
  a.norb = int_key("norb");
  a.n_alpha = int_key("n_alpha");
  a.n_beta = int_key("n_beta");
  if (!body) throw ParseError("missing 'determinants'", 0);
  if (a.wf.size() != expected) {
    throw ParseError("expected " + std::to_string(expected) + " determinants, found " +
                         std::to_string(a.wf.size()),
                     0);
  }
  if (const auto it = head.find("energy"); it != head.end()) {
    const auto [p, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(),
                                         a.wf.energy);
    if (ec != std::errc()) throw ParseError("bad 'energy'", 0);
  }
  if (a.norb <= 0 || a.norb > kMaxOrbitals) throw ParseError("norb out of range", 0);
  for (const auto& d : a.wf.dets) {
    try {
      check_within(d, a.norb);
    } catch (const DomainError& e) {
      throw ParseError(e.what(), 0);
    }
    if (d.n_alpha() != a.n_alpha || d.n_beta() != a.n_beta) {
      throw ParseError("determinant " + to_string(d) + " has the wrong particle numbers", 0);
    }
  }
  std::set<Determinant> seen(a.wf.dets.begin(), a.wf.dets.end());
  if (seen.size() != a.wf.size()) throw ParseError("duplicate determinants", 0);
  return a;
}

WavefunctionArtifact read_wavefunction(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return parse_wavefunction(in);
}

Artifacts cmd_run(const RunConfig& cfg) {
  const std::uint64_t hash = base_hash(cfg, "run");
  const IntegralModel model = build_model(cfg);
  const auto [na, nb] = electrons(cfg, model);
  const Determinant start = initial_determinant(cfg, model);

  Wavefunction wf;
  double e_var = 0.0;
  double e_pt2 = 0.0;
  bool converged = true;
  std::vector<IterationRecord> log;
  if (cfg.method == Method::exact) {
    const auto r = exact_diagonalize(model, {na, nb, cfg.sector}, 1e-10, cfg.space_cap);
    wf = r.wavefunction;
    e_var = r.energy;
    log.push_back({0, wf.size(), e_var, 0.0, wf.top_weight()});
  } else {
    const auto r = asci_run(model, {start}, cfg.asci);
    wf = r.final;
    e_var = r.e_var;
    e_pt2 = r.e_pt2;
    converged = r.converged;
    log = r.iterations;
  }

  Artifacts out;
  std::ostringstream s;
  s << header("iterations", hash);
  write_iteration_log(s, log);
  out.add("iterations.log", s.str());

  s.str("");
  write_wavefunction(s, wf, model.norb(), hex64(hash), cfg.top_k);
  out.add("wavefunction.txt", s.str());

  s.str("");
  s << header("overlap report", hash);
  write_overlap_report(s, overlap_report(wf, cfg.overlap_n));
  out.add("overlap.txt", s.str());

  s.str("");
  s << header("summary", hash);
  s << "method " << (cfg.method == Method::asci ? "asci" : "exact") << "\n";
  s << "model " << name_of(cfg.model) << "\n";
  s << "norb " << model.norb() << "\nn_alpha " << na << "\nn_beta " << nb << "\n";
  if (cfg.sector) s << "sector " << cfg.sector->kx << ' ' << cfg.sector->ky << "\n";
  s << "initial " << to_string(start) << "\n";
  s << "space_size " << wf.size() << "\n";
  s << "iterations " << log.size() << "\n";
  s << "converged " << (converged ? "true" : "false") << "\n";
  s << "e_var " << fmt(e_var) << "\n";
  s << "e_pt2 " << fmt(e_pt2) << "\n";
  s << "e_total " << fmt(e_var + e_pt2) << "\n";
  s << "top_weight " << fmt(wf.top_weight()) << "\n";
  s << "top_determinant " << (wf.size() ? to_string(wf.dets[0]) : "-") << "\n";
  out.add("summary.txt", s.str());
  return out;
}

Artifacts cmd_prep(const RunConfig& cfg) {
  std::uint64_t hash = base_hash(cfg, "prep");
  const std::string path = input_path(cfg, cfg.prep_input);
  const WavefunctionArtifact in = load_input(path, hash);
  if (cfg.prep_l > in.wf.size()) {
    throw ConfigError("[prep] L = " + std::to_string(cfg.prep_l) + " exceeds the " +
                      std::to_string(in.wf.size()) + " determinants in '" + path + "'");
  }
  const double kept = cumulative_weights(in.wf, cfg.prep_l).back().weight;
  const Wavefunction target = in.wf.truncated(cfg.prep_l);
  const PrepPlan plan = plan_from_wavefunction(target, in.norb, cfg.prep_hamming);
  const Circuit circuit = synthesize(plan);
  const GateCounts counts = gate_counts(circuit);

  std::string simulator = "none";
  std::optional<double> fid;
  double leak = 0.0;
  std::string note;
  const bool fits = circuit.n_qubits() <= kMaxDenseQubits;
  if (cfg.prep_verify == Verify::none) {
    note = "verification disabled";
  } else if (fits) {
    simulator = "dense";
    const auto state = simulate(circuit);
    fid = fidelity(state, target, in.norb);
    leak = aux_leakage(state, circuit);
  } else if (cfg.prep_verify == Verify::automatic) {
    simulator = "sparse";
    const auto state = simulate_sparse(circuit);
    fid = fidelity(state, target, in.norb);
    for (const auto& [p, a] : state) {
      if (circuit.uses_aux && p.test(circuit.aux())) leak = std::max(leak, std::abs(a));
    }
  } else {
    note = std::to_string(circuit.n_qubits()) + " qubits exceed the dense simulator limit of " +
           std::to_string(kMaxDenseQubits);
  }

  Artifacts out;
  out.add("circuit.txt", header("circuit", hash) + to_text(circuit));

  std::ostringstream s;
  s << header("prep report", hash);
  s << "norb " << in.norb << "\nqubits " << circuit.n_qubits() << "\n";
  s << "aux " << (circuit.uses_aux ? std::to_string(circuit.aux()) : "none") << "\n";
  s << "L " << cfg.prep_l << "\n";
  s << "order " << (cfg.prep_hamming ? "hamming" : "weight") << "\n";
  s << "truncation_weight " << fmt(kept) << "\n";
  s << "path_length " << path_length(plan.dets) << "\n";
  s << "simulator " << simulator << "\n";
  s << "fidelity " << (fid ? fmt(*fid) : "unverified") << "\n";
  if (fid) s << "aux_leakage " << fmt(leak) << "\n";
  if (!note.empty()) s << "note " << note << "\n";
  s << "gates_total " << counts.total << "\ngates_x " << counts.x << "\ngates_mcx " << counts.mcx
    << "\ngates_cry " << counts.cry << "\nerasures " << counts.erasures << "\nfanout "
    << counts.fanout << "\n";
  for (const auto& [k, n] : counts.control_histogram) s << "mcx_controls " << k << ' ' << n << "\n";
  out.add("prep_report.txt", s.str());
  if (fid && (*fid < 1.0 - 1e-10 || leak > 1e-12)) out.status = kExitSolver;
  return out;
}

Artifacts cmd_rotate(const RunConfig& cfg) {
  std::uint64_t hash = base_hash(cfg, "rotate");
  const IntegralModel model = build_model(cfg);
  if (!model.dense_capable()) {
    throw ConfigError("rotate refuses plane-wave Hubbard models");
  }
  const auto [na, nb] = electrons(cfg, model);
  const int norb = model.norb();

  Eigen::MatrixXd u;
  Eigen::VectorXd occ;
  if (cfg.rotation == RotationKind::natural) {
    const std::string path = input_path(cfg, cfg.rotate_input);
    WavefunctionArtifact in = load_input(path, hash);
    if (in.norb != norb) {
      throw ConfigError("wavefunction '" + path + "' has " + std::to_string(in.norb) +
                        " orbitals, the model " + std::to_string(norb));
    }
    in.wf.normalize();
    const auto no = natural_orbital_rotation(one_rdm(in.wf, norb));
    u = no.rotation;
    occ = no.occupations;
  } else {
    u = random_rotation(norb, cfg.seed);
  }
  const IntegralModel rotated = rotate_integrals(model, u);
  std::ostringstream fcidump;
  write_fcidump(fcidump, rotated);
  std::string text = fcidump.str();
  // Provenance goes into the namelist as an extra character key.
  const auto end = text.find("&END");
  text.insert(end, " ASCIPREP_HASH='" + hex64(hash) + "',\n");

  std::ostringstream s;
  s << header("rotate report", hash);
  s << "basis " << (cfg.rotation == RotationKind::natural ? "natural" : "random") << "\n";
  s << "norb " << norb << "\n";
  s << "unitarity_error "
    << fmt((u * u.transpose() - Eigen::MatrixXd::Identity(norb, norb)).cwiseAbs().maxCoeff())
    << "\n";
  for (Eigen::Index i = 0; i < occ.size(); ++i) s << "occupation " << i << ' ' << fmt(occ[i]) << "\n";

  Artifacts out;
  if (cfg.rotate_check) {
    std::istringstream back(text);
    const IntegralModel reread = parse_fcidump(back);
    const SectorSpec sector{na, nb, std::nullopt};
    const double before = exact_diagonalize(model, sector, 1e-10, cfg.space_cap).energy;
    const double after = exact_diagonalize(reread, sector, 1e-10, cfg.space_cap).energy;
    const bool ok = std::abs(before - after) <= 1e-8;
    s << "e_exact_before " << fmt(before) << "\ne_exact_after " << fmt(after) << "\n";
    s << "abs_difference " << fmt(std::abs(before - after)) << "\n";
    s << "invariant " << (ok ? "true" : "false") << "\n";
    if (!ok) out.status = kExitSolver;
  } else {
    s << "invariant unchecked\n";
  }

  std::ostringstream rot;
  rot << header("rotation", hash);
  write_matrix_triplets(rot, u);
  out.add("rotated.fcidump", text);
  out.add("rotation.txt", rot.str());
  out.add("rotate_report.txt", s.str());
  return out;
}

Artifacts cmd_report(const RunConfig& cfg) {
  std::uint64_t hash = base_hash(cfg, "report");
  const std::string path = input_path(cfg, cfg.report_input);
  WavefunctionArtifact in = load_input(path, hash);
  std::optional<IntegralModel> model;
  if (cfg.model != ModelKind::none) model = build_model(cfg);
  if (model && model->norb() != in.norb) {
    throw ConfigError("wavefunction '" + path + "' does not match the model orbital count");
  }

  std::ostringstream s;
  s << header("report", hash);
  s << "norb " << in.norb << "\nn_alpha " << in.n_alpha << "\nn_beta " << in.n_beta << "\n";
  s << "determinants " << in.wf.size() << "\n";
  s << "energy " << fmt(in.wf.energy) << "\n";
  double norm2 = 0.0;
  for (const double c : in.wf.coeffs) norm2 += c * c;
  s << "written_weight " << fmt(norm2) << "\n";
  const SectorSpec sector{in.n_alpha, in.n_beta, cfg.sector};
  if (model) {
    try {
      s << "sector_size " << sector_size(*model, sector, cfg.space_cap) << "\n";
    } catch (const SizeGuardError&) {
      s << "sector_size above " << cfg.space_cap << "\n";
    }
  }
  const OverlapReport rep = overlap_report(in.wf, cfg.overlap_n);
  s << "single_det_sq " << fmt(rep.single_det_sq) << "\n";
  if (!rep.reference.empty()) s << "reference " << to_string(rep.reference.front()) << "\n";

  Wavefunction normalized = in.wf;
  normalized.normalize();
  const OneRdm gamma = one_rdm(normalized, in.norb);
  const auto no = natural_orbital_rotation(gamma);
  for (Eigen::Index i = 0; i < no.occupations.size(); ++i) {
    s << "natural_occupation " << i << ' ' << fmt(no.occupations[i]) << "\n";
  }
  if (cfg.report_exact) {
    if (!model) throw ConfigError("[report] exact = true needs a [model] section");
    const auto ed = exact_diagonalize(*model, sector, 1e-10, cfg.space_cap);
    s << "exact_space_size " << ed.space_size << "\n";
    s << "e_exact " << fmt(ed.energy) << "\n";
    s << "e_error " << fmt(in.wf.energy - ed.energy) << "\n";
    s << "exact_top_weight " << fmt(ed.wavefunction.top_weight()) << "\n";
    s << "overlap_with_exact " << fmt(overlap_squared(normalized, ed.wavefunction)) << "\n";
  }
  for (const auto& p : rep.cumulative) s << "cumulative " << p.n << ' ' << fmt(p.weight) << "\n";

  std::ostringstream rdm;
  rdm << header("one-rdm", hash);
  write_matrix_triplets(rdm, gamma.matrix);

  Artifacts out;
  out.add("report.txt", s.str());
  out.add("rdm.txt", rdm.str());
  return out;
}

void write_artifacts(const std::string& dir, const Artifacts& artifacts) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
  for (const auto& [name, content] : artifacts.files) {
    const fs::path target = fs::path(dir) / name;
    const fs::path tmp = fs::path(dir) / (name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write '" + tmp.string() + "'");
      out << content;
      if (!out.flush()) throw IoError("cannot write '" + tmp.string() + "'");
    }
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename to '" + target.string() + "': " + ec.message());
  }
}

int run_command(std::string_view command, const std::string& config_path,
                const std::optional<std::string>& out_dir, const std::optional<std::uint64_t>& seed,
                std::ostream& log, std::ostream& err) {
  try {
    RunConfig cfg = load_config(config_path);
    if (out_dir) cfg.out_dir = *out_dir;
    if (seed) cfg.seed = *seed;
    Artifacts a;
    if (command == "run") {
      a = cmd_run(cfg);
    } else if (command == "prep") {
      a = cmd_prep(cfg);
    } else if (command == "rotate") {
      a = cmd_rotate(cfg);
    } else if (command == "report") {
      a = cmd_report(cfg);
    } else {
      throw ConfigError("unknown command '" + std::string(command) + "'");
    }
    write_artifacts(cfg.out_dir, a);
    for (const auto& f : a.files) log << (fs::path(cfg.out_dir) / f.first).string() << "\n";
    if (a.status != kExitOk) err << "error: post-condition check failed, see report\n";
    return a.status;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const SizeGuardError& e) {
    err << "size guard: " << e.what() << " (required " << e.required() << ")\n";
    return kExitSizeGuard;
  } catch (const std::exception& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace asciprep::cli
