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

#include "gentac/metrics/report.hpp"

#include <cstdio>
#include <stdexcept>

namespace gentac::metrics {

std::string report_number(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string trajectory_report_csv(const GeometricReport& geometry, const std::vector<HorizonStructure>& structure) {
  if (geometry.horizons.size() != structure.size()) throw std::invalid_argument("report horizons differ");
  std::string out = "horizon_s,stat,clips,ADE,FDE,dSI,dSA,dTW,dTL,dFN,dCD,dSO\n";
  for (std::size_t h = 0; h < structure.size(); ++h) {
    const auto& g = geometry.horizons[h];
    const auto& s = structure[h];
    for (int stat = 0; stat < 2; ++stat) {
      const bool min = stat == 0;
      out += report_number(g.seconds) + (min ? ",min," : ",avg,") + std::to_string(g.clips) + "," +
             report_number(min ? g.min_ade : g.avg_ade) + "," + report_number(min ? g.min_fde : g.avg_fde);
      for (double v : min ? s.min_delta : s.avg_delta) out += "," + report_number(v);
      out += "\n";
    }
  }
  return out;
}

}  // namespace gentac::metrics
