// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucpce {

// Cost model per unit: a + b*p + c*p^2 when committed, 0 otherwise.
struct Unit {
  double a = 0.0;      // fixed cost per committed period
  double b = 0.0;      // linear cost coefficient
  double c = 0.0;      // quadratic cost coefficient, >= 0
  double p_min = 0.0;  // MW, > 0
  double p_max = 0.0;  // MW, >= p_min
  double r_up = 0.0;   // ramp-up limit MW/period, > 0
  double r_dn = 0.0;   // ramp-down limit MW/period, > 0
};

struct Instance {
  std::string name;
  std::vector<Unit> units;
  std::vector<double> loads;     // MW demand per period, > 0
  std::vector<double> reserves;  // MW spinning reserve per period, >= 0

  int n_units() const { return static_cast<int>(units.size()); }
  int n_periods() const { return static_cast<int>(loads.size()); }
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Throws ValidationError listing every violated field, naming unit/period.
void validate(const Instance& inst);

// Bundled benchmark systems; throws std::out_of_range for unknown names.
Instance builtin_instance(const std::string& name);
std::vector<std::string> builtin_names();

// Sectioned text format: [meta] name/N/T, [units] one "a b c pmin pmax rup rdn"
// row per unit, [periods] one "load reserve" row per period.
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);
Instance parse_instance(const std::string& text, const std::string& origin = "<string>");
std::string format_instance(const Instance& inst);

// Ramp limits resampled around a target fraction of capacity, reserves around
// a target fraction of load; rounded to whole MW, deterministic per seed.
Instance synthesize_large(const Instance& base, double up_pct, double dn_pct,
                          double reserve_pct, std::uint64_t seed);

// Constraint rows of the binary-commitment problem: capacity lower+upper per
// unit-period, ramp up+down per unit-transition, balance and reserve per
// period.
long count_constraints(const Instance& inst);

}  // namespace ucpce
