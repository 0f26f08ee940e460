// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#pragma once

#include <Eigen/Dense>

namespace ucpce {

// Relaxed commitment matrix, entries in (0, 1); rows = units, cols = periods.
struct SoftSchedule {
  Eigen::MatrixXd y;

  int n_units() const { return static_cast<int>(y.rows()); }
  int n_periods() const { return static_cast<int>(y.cols()); }
};

// Hard commitment matrix, entries in {0, 1}.
struct BinarySchedule {
  Eigen::MatrixXi y;

  int n_units() const { return static_cast<int>(y.rows()); }
  int n_periods() const { return static_cast<int>(y.cols()); }
};

}  // namespace ucpce
