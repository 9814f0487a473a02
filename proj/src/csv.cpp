// Copyright 2026 The toptwo Authors
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

#include "toptwo/csv.hpp"

#include <cstdio>

namespace toptwo {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "n,arm,y";
  for (int i = 1; i <= trace.k; ++i) os << ",alpha_" << i;
  for (int i = 1; i <= trace.k; ++i) os << ",psibar_" << i;
  os << "\n";
  for (const TraceRecord& r : trace.records) {
    os << r.n << ',' << r.arm << ',' << format_double(r.y);
    for (double a : r.alpha) os << ',' << format_double(a);
    for (double p : r.psibar) os << ',' << format_double(p);
    os << "\n";
  }
}

void write_summary_csv(std::ostream& os, std::span<const Summary> summaries) {
  os << "rule,level,mean_hit,se_hit,n_censored\n";
  for (const Summary& s : summaries) {
    for (const LevelStat& stat : s.hits) {
      os << s.rule << ',' << format_double(stat.level) << ','
         << format_double(stat.mean) << ',' << format_double(stat.se) << ','
         << stat.censored << "\n";
    }
  }
}

}  // namespace toptwo
