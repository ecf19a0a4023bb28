// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

#include "asciprep/fcidump.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "asciprep/errors.hpp"

namespace asciprep {
namespace {

constexpr double kSymmetryTol = 1e-12;

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

// Key -> list of comma separated values from the namelist header.
std::map<std::string, std::vector<std::string>> parse_header(const std::string& text,
                                                              std::size_t line) {
  std::map<std::string, std::vector<std::string>> kv;
  std::string cleaned = text;
  for (char& c : cleaned) {
    if (c == ',' || c == '\n' || c == '\t') c = ' ';
  }
  std::istringstream ss(cleaned);
  std::string tok;
  std::string current;
  std::vector<std::string> pending;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      if (current.empty()) throw ParseError("malformed FCIDUMP header near '" + tok + "'", line);
      kv[current].push_back(tok);
      continue;
    }
    current = upper(tok.substr(0, eq));
    if (current.empty()) throw ParseError("malformed FCIDUMP header near '" + tok + "'", line);
    kv[current];
    std::string rest = tok.substr(eq + 1);
    if (!rest.empty()) kv[current].push_back(rest);
  }
  return kv;
}

int header_int(const std::map<std::string, std::vector<std::string>>& kv, const std::string& key,
               std::optional<int> fallback, std::size_t line) {
  const auto it = kv.find(key);
  if (it == kv.end() || it->second.empty()) {
    if (fallback) return *fallback;
    throw ParseError("FCIDUMP header lacks " + key, line);
  }
  char* end = nullptr;
  const long v = std::strtol(it->second.front().c_str(), &end, 10);
  if (*end != '\0') throw ParseError("non-integer " + key + " in FCIDUMP header", line);
  return static_cast<int>(v);
}

double parse_value(std::string tok, std::size_t line) {
  std::replace(tok.begin(), tok.end(), 'D', 'E');
  std::replace(tok.begin(), tok.end(), 'd', 'e');
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || *end != '\0') throw ParseError("non-numeric value '" + tok + "'", line);
  return v;
}

int parse_index(const std::string& tok, int norb, std::size_t line) {
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (tok.empty() || *end != '\0') throw ParseError("non-integer index '" + tok + "'", line);
  if (v < 0 || v > norb) {
    throw ParseError("index " + tok + " outside [1, " + std::to_string(norb) + "]", line);
  }
  return static_cast<int>(v);
}

bool header_done(const std::string& line) {
  const std::string u = upper(line);
  if (u.find("&END") != std::string::npos) return true;
  const auto last = u.find_last_not_of(" \t\r");
  if (last == std::string::npos) return false;
  if (u[last] == '/') return true;
  // A lone "&" also closes the namelist in some writers.
  const auto first = u.find_first_not_of(" \t\r");
  return u.substr(first, last - first + 1) == "&";
}

}  // namespace

IntegralModel parse_fcidump(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::string header;
  bool started = false;
  bool finished = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!started) {
      const auto pos = upper(line).find("&FCI");
      if (pos == std::string::npos) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw ParseError("FCIDUMP must start with &FCI", lineno);
      }
      started = true;
      line = line.substr(pos + 4);
    }
    const bool done = header_done(line);
    std::string body = line;
    if (done) {
      const std::string u = upper(body);
      auto cut = u.find("&END");
      if (cut == std::string::npos) cut = u.find_last_of("/&");
      body = body.substr(0, cut);
    }
    header += body + "\n";
    if (done) {
      finished = true;
      break;
    }
  }
  if (!started) throw ParseError("empty FCIDUMP", lineno);
  if (!finished) throw ParseError("FCIDUMP header is not terminated", lineno);

  const auto kv = parse_header(header, lineno);
  const int norb = header_int(kv, "NORB", std::nullopt, lineno);
  const int nelec = header_int(kv, "NELEC", std::nullopt, lineno);
  const int ms2 = header_int(kv, "MS2", 0, lineno);
  if (norb <= 0 || norb > kMaxOrbitals) throw ParseError("NORB out of range", lineno);
  if (nelec < 0 || (nelec + ms2) % 2 != 0 || std::abs(ms2) > nelec) {
    throw ParseError("inconsistent NELEC/MS2", lineno);
  }
  if (const auto it = kv.find("UHF"); it != kv.end() && !it->second.empty()) {
    const std::string v = upper(it->second.front());
    if (v == "TRUE" || v == ".TRUE." || v == "T" || v == "1") {
      throw ParseError("unrestricted FCIDUMP files are not supported", lineno);
    }
  }

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(norb, norb);
  Eigen::MatrixXi h_seen = Eigen::MatrixXi::Zero(norb, norb);
  TwoBodyTable g(norb);
  std::vector<char> g_seen(g.data().size(), 0);
  double e_core = 0.0;

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tok[5];
    int n = 0;
    while (n < 5 && ss >> tok[n]) ++n;
    if (n == 0) continue;
    std::string extra;
    if (n != 5 || (ss >> extra)) throw ParseError("expected 'value i j k l'", lineno);
    const double v = parse_value(tok[0], lineno);
    const int i = parse_index(tok[1], norb, lineno);
    const int j = parse_index(tok[2], norb, lineno);
    const int k = parse_index(tok[3], norb, lineno);
    const int l = parse_index(tok[4], norb, lineno);

    if (i == 0 && j == 0 && k == 0 && l == 0) {
      e_core = v;
    } else if (k == 0 && l == 0) {
      if (j == 0) continue;  // orbital energy record
      if (i == 0) throw ParseError("one-body record with zero first index", lineno);
      const int p = i - 1;
      const int q = j - 1;
      if (h_seen(p, q) && std::abs(h(p, q) - v) > kSymmetryTol) {
        throw ParseError("one-body integrals violate h_pq = h_qp", lineno);
      }
      h(p, q) = h(q, p) = v;
      h_seen(p, q) = h_seen(q, p) = 1;
    } else {
      if (i == 0 || j == 0 || k == 0 || l == 0) {
        throw ParseError("two-body record with a zero index", lineno);
      }
      const std::size_t idx = g.index(i - 1, j - 1, k - 1, l - 1);
      if (g_seen[idx] && std::abs(g.data()[idx] - v) > kSymmetryTol) {
        throw ParseError("two-body integrals violate 8-fold permutational symmetry", lineno);
      }
      if (!g_seen[idx]) g.set(i - 1, j - 1, k - 1, l - 1, v);
      g_seen[idx] = 1;
    }
  }

  return IntegralModel(std::move(h), std::move(g), e_core, (nelec + ms2) / 2, (nelec - ms2) / 2);
}

IntegralModel read_fcidump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open FCIDUMP '" + path + "'");
  return parse_fcidump(in);
}

void write_fcidump(std::ostream& out, const IntegralModel& model) {
  const int n = model.norb();
  const TwoBodyTable g = model.two_body_table();
  const Eigen::MatrixXd h = model.one_body_matrix();
  char buf[96];
  out << "&FCI NORB=" << n << ",NELEC=" << model.n_alpha() + model.n_beta()
      << ",MS2=" << model.n_alpha() - model.n_beta() << ",\n&END\n";
  auto rec = [&](double v, int i, int j, int k, int l) {
    std::snprintf(buf, sizeof buf, "%24.16e %4d %4d %4d %4d\n", v, i, j, k, l);
    out << buf;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const int ij = i * (i + 1) / 2 + j;
      for (int k = 0; k <= i; ++k) {
        for (int l = 0; l <= k; ++l) {
          if (k * (k + 1) / 2 + l > ij) break;
          const double v = g.get(i, j, k, l);
          if (v != 0.0) rec(v, i + 1, j + 1, k + 1, l + 1);
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      if (h(i, j) != 0.0) rec(h(i, j), i + 1, j + 1, 0, 0);
    }
  }
  rec(model.e_core(), 0, 0, 0, 0);
}

void write_fcidump(const std::string& path, const IntegralModel& model) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write FCIDUMP '" + path + "'");
  write_fcidump(out, model);
}

}  // namespace asciprep
