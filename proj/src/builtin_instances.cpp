// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#include <stdexcept>

#include "ucpce/instance.hpp"

namespace ucpce {

namespace {

Instance make_uc4b() {
  Instance s;
  s.name = "UC_4b";
  s.units = {
      {1000, 16.19, 0.00048, 150, 455, 80, 100},
      {700, 16.50, 0.00200, 20, 130, 15, 30},
      {450, 16.70, 0.00398, 25, 165, 30, 40},
      {370, 22.26, 0.00712, 20, 80, 5, 10},
  };
  s.loads = {650, 530, 450};
  s.reserves = {50, 25, 15};
  return s;
}

// UC_10a and UC_10b share the unit fleet and differ only in the load profile.
std::vector<Unit> ten_unit_fleet() {
  return {
      {660, 25.92, 0.00413, 10, 55, 80, 25},
      {670, 27.76, 0.00173, 10, 55, 20, 10},
      {700, 16.60, 0.00200, 20, 130, 20, 30},
      {680, 16.50, 0.00211, 20, 130, 40, 50},
      {450, 19.70, 0.00398, 25, 165, 35, 35},
      {970, 17.26, 0.00031, 150, 455, 50, 60},
      {480, 27.74, 0.00790, 25, 85, 15, 70},
      {665, 27.27, 0.00222, 10, 55, 80, 100},
      {1000, 16.19, 0.00048, 150, 455, 50, 80},
      {370, 22.26, 0.00712, 20, 80, 30, 40},
  };
}

Instance make_uc10a() {
  Instance s;
  s.name = "UC_10a";
  s.units = ten_unit_fleet();
  s.loads = {900, 1000, 1300};
  s.reserves = {20, 10, 30};
  return s;
}

Instance make_uc10b() {
  Instance s;
  s.name = "UC_10b";
  s.units = ten_unit_fleet();
  s.loads = {1300, 1400, 1200};
  s.reserves = {20, 10, 30};
  return s;
}

Instance make_uc12a() {
  Instance s;
  s.name = "UC_12a";
  s.units = ten_unit_fleet();
  s.units.push_back({490, 18.50, 0.00740, 50, 185, 70, 40});
  s.units.push_back({735, 24.90, 0.00154, 120, 370, 60, 80});
  s.loads = {1500, 1350, 1450};
  s.reserves = {20, 10, 30};
  return s;
}

Instance make_uc12b() {
  Instance s;
  s.name = "UC_12b";
  s.units = {
      {960, 20.40, 0.00287, 170, 355, 40, 75},
      {470, 29.80, 0.00788, 20, 55, 30, 60},
      {560, 28.50, 0.00646, 85, 400, 50, 40},
      {400, 15.90, 0.00057, 155, 360, 70, 35},
      {600, 27.90, 0.00260, 195, 430, 30, 85},
      {1000, 17.20, 0.00584, 200, 465, 40, 70},
      {900, 17.70, 0.00199, 100, 275, 70, 75},
      {910, 27.30, 0.00454, 65, 305, 80, 50},
      {830, 21.30, 0.00270, 15, 70, 60, 85},
      {750, 24.40, 0.00150, 160, 320, 100, 30},
      {860, 28.90, 0.00260, 30, 220, 50, 80},
      {980, 21.90, 0.00109, 60, 470, 70, 65},
  };
  s.loads = {2000, 2200, 2500};
  s.reserves = {50, 20, 40};
  return s;
}

// The two 26-unit systems share cost data, capacities, and loads; UC_26b has
// tighter ramp limits and a doubled reserve profile.
Instance make_uc26(bool tight_ramps) {
  struct Row {
    double a, b, c, p_min, p_max, r_up_a, r_dn_a, r_up_b, r_dn_b;
  };
  static const Row rows[26] = {
      {24.3891, 25.55, 0.02533, 2.40, 12.00, 4, 5, 2, 3},
      {24.4110, 25.68, 0.02649, 2.40, 12.00, 4, 5, 2, 3},
      {24.6382, 25.80, 0.02801, 2.40, 12.00, 4, 5, 2, 3},
      {24.7605, 25.93, 0.02842, 2.40, 12.00, 4, 5, 2, 3},
      {24.8882, 26.06, 0.02855, 2.40, 12.00, 4, 5, 2, 3},
      {117.7550, 37.55, 0.01199, 4.00, 20.00, 6, 8, 4, 5},
      {118.1080, 37.66, 0.01261, 4.00, 20.00, 6, 8, 4, 5},
      {118.4580, 37.78, 0.01359, 4.00, 20.00, 6, 8, 4, 5},
      {118.8210, 37.89, 0.01433, 4.00, 20.00, 6, 8, 4, 5},
      {81.1364, 13.33, 0.00876, 15.20, 76.00, 23, 28, 15, 19},
      {81.2980, 13.36, 0.00895, 15.20, 76.00, 23, 28, 15, 19},
      {81.4641, 13.38, 0.00910, 15.20, 76.00, 23, 28, 15, 19},
      {81.6259, 13.41, 0.00932, 15.20, 76.00, 23, 28, 15, 19},
      {217.8950, 18.00, 0.00623, 25.00, 100.00, 30, 35, 20, 25},
      {218.3350, 18.10, 0.00612, 25.00, 100.00, 30, 35, 20, 25},
      {218.7750, 18.20, 0.00598, 25.00, 100.00, 30, 35, 20, 25},
      {142.7350, 10.69, 0.00463, 54.25, 155.00, 47, 54, 31, 39},
      {142.0290, 10.72, 0.00473, 54.25, 155.00, 47, 54, 31, 39},
      {143.3180, 10.74, 0.00481, 54.25, 155.00, 47, 54, 31, 39},
      {143.5970, 10.76, 0.00487, 54.25, 155.00, 47, 54, 31, 39},
      {259.1310, 23.00, 0.00259, 68.95, 197.00, 59, 69, 39, 49},
      {259.6490, 23.10, 0.00260, 68.95, 197.00, 59, 69, 39, 49},
      {260.1760, 23.20, 0.00263, 68.95, 197.00, 59, 69, 39, 49},
      {177.0580, 10.86, 0.00153, 140.00, 350.00, 105, 125, 70, 88},
      {310.0020, 7.49, 0.00194, 100.00, 400.00, 120, 140, 80, 100},
      {311.9100, 7.50, 0.00195, 100.00, 400.00, 120, 140, 80, 100},
  };
  Instance s;
  s.name = tight_ramps ? "UC_26b" : "UC_26a";
  s.units.reserve(26);
  for (const Row& r : rows) {
    Unit u{r.a, r.b, r.c, r.p_min, r.p_max,
           tight_ramps ? r.r_up_b : r.r_up_a,
           tight_ramps ? r.r_dn_b : r.r_dn_a};
    s.units.push_back(u);
  }
  s.loads = {1700, 1730, 1690, 1700, 1750, 1850,
             2000, 2430, 2540, 2600, 2670, 2590};
  if (tight_ramps) {
    s.reserves = {85, 86, 84, 85, 88, 92, 100, 122, 127, 130, 134, 130};
  } else {
    s.reserves = {51, 52, 51, 51, 52, 56, 60, 73, 76, 78, 80, 78};
  }
  return s;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"UC_4b", "UC_10a", "UC_10b", "UC_12a", "UC_12b", "UC_26a", "UC_26b"};
}

Instance builtin_instance(const std::string& name) {
  if (name == "UC_4b") return make_uc4b();
  if (name == "UC_10a") return make_uc10a();
  if (name == "UC_10b") return make_uc10b();
  if (name == "UC_12a") return make_uc12a();
  if (name == "UC_12b") return make_uc12b();
  if (name == "UC_26a") return make_uc26(false);
  if (name == "UC_26b") return make_uc26(true);
  throw std::out_of_range("unknown builtin instance: " + name);
}

}  // namespace ucpce
