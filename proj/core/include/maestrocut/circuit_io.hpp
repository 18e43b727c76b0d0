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

#include "maestrocut/cutgraph.hpp"

#include <filesystem>
#include <string_view>

namespace maestrocut::cutgraph {

/**
 * Parses the line-oriented circuit format, one gate per line:
 *
 *     gate <id> q=<q1,q2,...> d=<depth> [e=<ebit cost>]
 *
 * Blank lines and lines starting with '#' are ignored. The optional e= field
 * sets the e-bit cost of the hyperedge that gate creates (default 1).
 */
[[nodiscard]] Hypergraph parse_circuit_text(std::string_view text);

/// Same content as a JSON document: {"gates": [{"id": .., "q": [..], "d": .., "e": ..}]}.
[[nodiscard]] Hypergraph parse_circuit_json(std::string_view text);

/// Dispatches on the extension: ".json" is JSON, anything else the line format.
[[nodiscard]] Hypergraph load_circuit(const std::filesystem::path &path);

} // namespace maestrocut::cutgraph
