// Copyright 2026 The MaestroCut Authors
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

#pragma once

#include <span>
#include <vector>

namespace maestrocut::stats {

double mean(std::span<const double> xs);

/// Unbiased sample variance (n - 1 denominator); 0 for fewer than two samples.
double sample_variance(std::span<const double> xs);

/// Linear-interpolation quantile (Hyndman-Fan type 7); q in [0, 1].
double quantile(std::span<const double> xs, double q);

double median(std::span<const double> xs);

} // namespace maestrocut::stats
