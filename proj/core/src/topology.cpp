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

#include "maestrocut/topology.hpp"

#include "maestrocut/errors.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <numeric>
#include <regex>
#include <sstream>

namespace maestrocut {

Topology::Topology(std::size_t num_nodes, std::vector<std::pair<NodeId, NodeId>> edges,
                   std::vector<long> labels)
    : adjacency_(num_nodes), labels_(std::move(labels)) {
    if (labels_.empty()) {
        labels_.resize(num_nodes);
        std::iota(labels_.begin(), labels_.end(), 0L);
    }
    if (labels_.size() != num_nodes) {
        throw ParseError("topology label count does not match node count");
    }
    for (auto [a, b] : edges) {
        if (a >= num_nodes || b >= num_nodes) {
            throw ParseError("topology edge references a missing node");
        }
        if (a == b) {
            continue;
        }
        if (a > b) {
            std::swap(a, b);
        }
        edges_.emplace_back(a, b);
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    for (const auto &[a, b] : edges_) {
        adjacency_[a].push_back(b);
        adjacency_[b].push_back(a);
    }
    for (auto &nbrs : adjacency_) {
        std::sort(nbrs.begin(), nbrs.end());
    }

    distances_.assign(num_nodes * num_nodes, -1);
    std::deque<NodeId> frontier;
    for (NodeId src = 0; src < num_nodes; ++src) {
        int *row = distances_.data() + static_cast<std::size_t>(src) * num_nodes;
        row[src] = 0;
        frontier.assign(1, src);
        while (!frontier.empty()) {
            const NodeId u = frontier.front();
            frontier.pop_front();
            for (const NodeId v : adjacency_[u]) {
                if (row[v] < 0) {
                    row[v] = row[u] + 1;
                    frontier.push_back(v);
                }
            }
        }
    }
}

Topology Topology::heavy_hex(int rows, int cols) {
    if (rows < 1 || cols < 1) {
        throw DomainError("heavy-hex lattice needs at least one row and one column");
    }
    const int width = 4 * cols + 1;
    const auto row_node = [&](int r, int c) { return static_cast<NodeId>(r * width + c); };
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c + 1 < width; ++c) {
            edges.emplace_back(row_node(r, c), row_node(r, c + 1));
        }
    }
    auto next = static_cast<NodeId>(rows * width);
    for (int r = 0; r + 1 < rows; ++r) {
        const int offset = (r % 2 == 0) ? 0 : 2;
        for (int c = offset; c < width; c += 4) {
            const NodeId bridge = next++;
            edges.emplace_back(row_node(r, c), bridge);
            edges.emplace_back(bridge, row_node(r + 1, c));
        }
    }
    return Topology(next, std::move(edges));
}

Topology Topology::parse_edge_list(std::string_view text) {
    std::map<long, NodeId> ids;
    std::vector<long> labels;
    std::vector<std::pair<NodeId, NodeId>> edges;
    auto intern = [&](long label) {
        const auto [it, inserted] = ids.emplace(label, static_cast<NodeId>(labels.size()));
        if (inserted) {
            labels.push_back(label);
        }
        return it->second;
    };
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        long a = 0;
        long b = 0;
        if (!(fields >> a)) {
            continue;
        }
        std::string rest;
        if (!(fields >> b) || (fields >> rest)) {
            throw ParseError("edge list line " + std::to_string(line_no) + ": expected 'u v'");
        }
        const NodeId ia = intern(a);
        const NodeId ib = intern(b);
        edges.emplace_back(ia, ib);
    }
    const auto n = labels.size();
    return Topology(n, std::move(edges), std::move(labels));
}

Topology Topology::load_edge_list(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read topology file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_edge_list(buffer.str());
}

Topology Topology::from_spec(const std::string &spec) {
    static const std::regex kHeavyHex(R"(heavyhex:(\d+)x(\d+))");
    std::smatch match;
    if (std::regex_match(spec, match, kHeavyHex)) {
        return heavy_hex(std::stoi(match[1].str()), std::stoi(match[2].str()));
    }
    return load_edge_list(spec);
}

int Topology::distance(NodeId a, NodeId b) const {
    const auto n = num_nodes();
    if (a >= n || b >= n) {
        throw DistanceError("distance query on a missing node");
    }
    const int d = distances_[static_cast<std::size_t>(a) * n + b];
    if (d < 0) {
        throw DistanceError("nodes " + std::to_string(labels_[a]) + " and " +
                            std::to_string(labels_[b]) + " are disconnected");
    }
    return d;
}

bool Topology::connected() const noexcept {
    return std::none_of(distances_.begin(), distances_.end(), [](int d) { return d < 0; });
}

} // namespace maestrocut
