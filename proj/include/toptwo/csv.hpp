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

#ifndef TOPTWO_CSV_HPP_
#define TOPTWO_CSV_HPP_

#include <ostream>
#include <span>
#include <string>

#include "toptwo/sim.hpp"

namespace toptwo {

// trace.csv schema: n, arm, y, alpha_1..k, psibar_1..k
void write_trace_csv(std::ostream& os, const Trace& trace);

// summary.csv schema: rule, level, mean_hit, se_hit, n_censored
void write_summary_csv(std::ostream& os, std::span<const Summary> summaries);

// Deterministic numeric formatting shared by all emitters.
std::string format_double(double v);

}  // namespace toptwo

#endif  // TOPTWO_CSV_HPP_
