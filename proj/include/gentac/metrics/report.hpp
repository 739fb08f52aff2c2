// Copyright 2026 The gentac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "gentac/metrics/geometric.hpp"
#include "gentac/metrics/structure.hpp"

#include <string>
#include <vector>

namespace gentac::metrics {

/// One row per (horizon, statistic) with columns
/// horizon_s,stat,clips,ADE,FDE,dSI,dSA,dTW,dTL,dFN,dCD,dSO.
/// Both reports must list the same horizons.
std::string trajectory_report_csv(const GeometricReport& geometry, const std::vector<HorizonStructure>& structure);

/// Six-decimal fixed formatting shared by every report.
std::string report_number(double v);

}  // namespace gentac::metrics
