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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace maestrocut {

using NodeId = std::uint32_t;

/// Undirected device connectivity graph with all-pairs hop distances cached at construction.
class Topology {
  public:
    Topology() = default;
    Topology(std::size_t num_nodes, std::vector<std::pair<NodeId, NodeId>> edges,
             std::vector<long> labels = {});

    /**
     * Heavy-hex lattice: `rows` lines of 4*cols+1 qubits, consecutive lines
     * joined by bridge qubits at columns 0, 4, 8, ... (even line pairs) or
     * 2, 6, 10, ... (odd line pairs). Every node has degree at most 3.
     */
    static Topology heavy_hex(int rows, int cols);

    /// `u v` pairs, one per line; '#' comments allowed. Node labels are mapped to dense ids.
    static Topology parse_edge_list(std::string_view text);
    static Topology load_edge_list(const std::filesystem::path &path);

    /// "heavyhex:RxC" generates a lattice; anything else is read as an edge-list file.
    static Topology from_spec(const std::string &spec);

    [[nodiscard]] std::size_t num_nodes() const noexcept { return adjacency_.size(); }
    [[nodiscard]] const std::vector<std::pair<NodeId, NodeId>> &edges() const noexcept {
        return edges_;
    }
    [[nodiscard]] const std::vector<NodeId> &neighbors(NodeId node) const {
        return adjacency_.at(node);
    }
    [[nodiscard]] long label(NodeId node) const { return labels_.at(node); }

    /// Hop distance; throws DistanceError when the nodes are disconnected.
    [[nodiscard]] int distance(NodeId a, NodeId b) const;
    [[nodiscard]] bool connected() const noexcept;

  private:
    std::vector<std::vector<NodeId>> adjacency_;
    std::vector<std::pair<NodeId, NodeId>> edges_;
    std::vector<long> labels_;
    std::vector<int> distances_; // row-major, -1 when unreachable
};

} // namespace maestrocut
