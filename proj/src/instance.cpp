// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#include "ucpce/instance.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ucpce/rng.hpp"

namespace ucpce {

namespace {

bool finite(double v) { return std::isfinite(v); }

// Shortest fixed-point rendering with at most 6 fractional digits that parses
// back to the exact value; falls back to 17 significant digits for values that
// need them. Keeps saved files human-readable without breaking round-trips.
std::string format_number(double v) {
  char buf[64];
  for (int digits = 0; digits <= 6; ++digits) {
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_number(const std::string& tok, int line_no, const std::string& origin) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || !finite(v)) {
    throw ParseError(origin + ":" + std::to_string(line_no) +
                     ": not a finite number: '" + tok + "'");
  }
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void validate(const Instance& inst) {
  std::vector<std::string> errs;
  const int n = inst.n_units();
  const int t = inst.n_periods();
  if (n < 1) errs.push_back("instance has no units");
  if (t < 1) errs.push_back("instance has no periods");
  if (inst.reserves.size() != inst.loads.size()) {
    errs.push_back("reserves length " + std::to_string(inst.reserves.size()) +
                   " does not match periods " + std::to_string(inst.loads.size()));
  }
  for (int i = 0; i < n; ++i) {
    const Unit& u = inst.units[i];
    const std::string tag = "unit " + std::to_string(i + 1) + ": ";
    if (!finite(u.a) || !finite(u.b) || !finite(u.c) || !finite(u.p_min) ||
        !finite(u.p_max) || !finite(u.r_up) || !finite(u.r_dn)) {
      errs.push_back(tag + "non-finite field");
      continue;
    }
    if (u.c < 0) errs.push_back(tag + "c < 0");
    if (!(u.p_min > 0)) errs.push_back(tag + "p_min must be > 0");
    if (u.p_max < u.p_min) errs.push_back(tag + "p_max < p_min");
    if (!(u.r_up > 0)) errs.push_back(tag + "r_up must be > 0");
    if (!(u.r_dn > 0)) errs.push_back(tag + "r_dn must be > 0");
  }
  for (size_t k = 0; k < inst.loads.size(); ++k) {
    if (!finite(inst.loads[k]) || !(inst.loads[k] > 0)) {
      errs.push_back("period " + std::to_string(k + 1) + ": load must be > 0");
    }
  }
  for (size_t k = 0; k < inst.reserves.size(); ++k) {
    if (!finite(inst.reserves[k]) || inst.reserves[k] < 0) {
      errs.push_back("period " + std::to_string(k + 1) + ": reserve must be >= 0");
    }
  }
  if (!errs.empty()) {
    std::string msg = "invalid instance '" + inst.name + "':";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ValidationError(msg);
  }
}

long count_constraints(const Instance& inst) {
  const long n = inst.n_units();
  const long t = inst.n_periods();
  return 2 * n * t + 2 * n * (t - 1) + t + t;
}

std::string format_instance(const Instance& inst) {
  std::ostringstream os;
  os << "[meta]\n";
  os << "name " << inst.name << "\n";
  os << "N " << inst.n_units() << "\n";
  os << "T " << inst.n_periods() << "\n";
  os << "\n[units]\n";
  os << "# a b c pmin pmax rup rdn\n";
  for (const Unit& u : inst.units) {
    os << format_number(u.a) << ' ' << format_number(u.b) << ' '
       << format_number(u.c) << ' ' << format_number(u.p_min) << ' '
       << format_number(u.p_max) << ' ' << format_number(u.r_up) << ' '
       << format_number(u.r_dn) << "\n";
  }
  os << "\n[periods]\n";
  os << "# load reserve\n";
  for (int t = 0; t < inst.n_periods(); ++t) {
    os << format_number(inst.loads[t]) << ' ' << format_number(inst.reserves[t])
       << "\n";
  }
  return os.str();
}

Instance parse_instance(const std::string& text, const std::string& origin) {
  Instance inst;
  enum class Section { None, Meta, Units, Periods };
  Section sec = Section::None;
  int declared_n = -1, declared_t = -1;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = strip(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line == "[meta]") sec = Section::Meta;
      else if (line == "[units]") sec = Section::Units;
      else if (line == "[periods]") sec = Section::Periods;
      else
        throw ParseError(origin + ":" + std::to_string(line_no) +
                         ": unknown section " + line);
      continue;
    }
    switch (sec) {
      case Section::None:
        throw ParseError(origin + ":" + std::to_string(line_no) +
                         ": content before first section header");
      case Section::Meta: {
        const auto pos = line.find_first_of(" \t");
        if (pos == std::string::npos) {
          throw ParseError(origin + ":" + std::to_string(line_no) +
                           ": meta line needs 'key value'");
        }
        const std::string key = line.substr(0, pos);
        const std::string val = strip(line.substr(pos + 1));
        if (key == "name") {
          inst.name = val;
        } else if (key == "N") {
          declared_n = static_cast<int>(parse_number(val, line_no, origin));
        } else if (key == "T") {
          declared_t = static_cast<int>(parse_number(val, line_no, origin));
        } else {
          throw ParseError(origin + ":" + std::to_string(line_no) +
                           ": unknown meta key '" + key + "'");
        }
        break;
      }
      case Section::Units: {
        const auto toks = split_ws(line);
        if (toks.size() != 7) {
          throw ParseError(origin + ":" + std::to_string(line_no) +
                           ": unit row needs 7 fields (a b c pmin pmax rup rdn), got " +
                           std::to_string(toks.size()));
        }
        Unit u;
        u.a = parse_number(toks[0], line_no, origin);
        u.b = parse_number(toks[1], line_no, origin);
        u.c = parse_number(toks[2], line_no, origin);
        u.p_min = parse_number(toks[3], line_no, origin);
        u.p_max = parse_number(toks[4], line_no, origin);
        u.r_up = parse_number(toks[5], line_no, origin);
        u.r_dn = parse_number(toks[6], line_no, origin);
        inst.units.push_back(u);
        break;
      }
      case Section::Periods: {
        const auto toks = split_ws(line);
        if (toks.size() != 2) {
          throw ParseError(origin + ":" + std::to_string(line_no) +
                           ": period row needs 2 fields (load reserve), got " +
                           std::to_string(toks.size()));
        }
        inst.loads.push_back(parse_number(toks[0], line_no, origin));
        inst.reserves.push_back(parse_number(toks[1], line_no, origin));
        break;
      }
    }
  }
  if (declared_n >= 0 && declared_n != inst.n_units()) {
    throw ParseError(origin + ": meta declares N=" + std::to_string(declared_n) +
                     " but [units] has " + std::to_string(inst.n_units()) + " rows");
  }
  if (declared_t >= 0 && declared_t != inst.n_periods()) {
    throw ParseError(origin + ": meta declares T=" + std::to_string(declared_t) +
                     " but [periods] has " + std::to_string(inst.n_periods()) + " rows");
  }
  validate(inst);
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open instance file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_instance(os.str(), path);
}

void save_instance(const Instance& inst, const std::string& path) {
  validate(inst);
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write instance file: " + path);
  f << format_instance(inst);
}

Instance synthesize_large(const Instance& base, double up_pct, double dn_pct,
                          double reserve_pct, std::uint64_t seed) {
  if (!(up_pct > 0 && up_pct < 1) || !(dn_pct > 0 && dn_pct < 1)) {
    throw std::invalid_argument("ramp percentages must lie in (0, 1)");
  }
  if (!(reserve_pct >= 0 && reserve_pct < 1)) {
    throw std::invalid_argument("reserve percentage must lie in [0, 1)");
  }
  Instance out = base;
  out.name = base.name + "_aug" + std::to_string(seed);
  Rng rng(seed);
  for (Unit& u : out.units) {
    // Half-width 0.05 around the target fraction; whole-MW ramps, floored at
    // 1 MW so the positivity invariant survives tiny units.
    const double fu = rng.uniform(up_pct - 0.05, up_pct + 0.05);
    const double fd = rng.uniform(dn_pct - 0.05, dn_pct + 0.05);
    u.r_up = std::max(1.0, std::round(u.p_max * fu));
    u.r_dn = std::max(1.0, std::round(u.p_max * fd));
  }
  for (size_t t = 0; t < out.loads.size(); ++t) {
    const double fr = rng.uniform(reserve_pct - 0.005, reserve_pct + 0.005);
    out.reserves[t] = std::max(0.0, std::round(out.loads[t] * fr));
  }
  validate(out);
  return out;
}

}  // namespace ucpce
