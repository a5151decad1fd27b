// Copyright 2026 The twopath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TWOPATH_DATASET_IO_H
#define TWOPATH_DATASET_IO_H

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "twopath/harness.h"

namespace twopath {

/// Header `phi_rad,p00,p01,p10,p11,p0b,p1b,c0,c1` followed by `se_<name>`
/// columns when the rows carry standard errors. 12 significant digits.
void write_csv(std::ostream& out, const SweepDataset& dataset);

/// Throws ParseError for a malformed header or row.
std::vector<SweepRow> read_csv(std::istream& in);

nlohmann::ordered_json config_to_json(const SweepConfig& config);
/// Inverse of config_to_json. Throws ParseError for missing or bad keys.
SweepConfig config_from_json(const nlohmann::ordered_json& j);

/// Flat sidecar: the configuration followed by run metadata (CNOT phase
/// report, preparation solution, invariant summary) and residual reports.
nlohmann::ordered_json sidecar_json(const SweepDataset& dataset, const std::vector<ResidualReport>& reports);

/// 12-significant-digit rendering used across all CSV output.
std::string csv_number(double x);

}  // namespace twopath

#endif  // TWOPATH_DATASET_IO_H
