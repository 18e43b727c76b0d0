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

#include "maestrocut/circuit_io.hpp"

#include "maestrocut/errors.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

namespace maestrocut::cutgraph {

namespace {

template <typename T> T parse_number(std::string_view token, std::size_t line) {
    T value{};
    const auto *end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError("line " + std::to_string(line) + ": bad number '" + std::string(token) +
                         "'");
    }
    return value;
}

double parse_double(std::string_view token, std::size_t line) {
    try {
        std::size_t used = 0;
        const std::string s(token);
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument("trailing");
        }
        return v;
    } catch (const std::exception &) {
        throw ParseError("line " + std::to_string(line) + ": bad number '" + std::string(token) +
                         "'");
    }
}

} // namespace

Hypergraph parse_circuit_text(std::string_view text) {
    std::vector<Gate> gates;
    std::vector<double> costs;
    bool any_cost = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto first = raw.find_first_not_of(" \t\r");
        if (first == std::string::npos || raw[first] == '#') {
            continue;
        }
        std::istringstream fields(raw);
        std::string keyword;
        Gate gate;
        fields >> keyword >> gate.id;
        if (keyword != "gate" || gate.id.empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 'gate <id> ...'");
        }
        bool have_q = false;
        bool have_d = false;
        double cost = 1.0;
        std::string field;
        while (fields >> field) {
            const auto eq = field.find('=');
            if (eq == std::string::npos) {
                throw ParseError("line " + std::to_string(line_no) + ": field '" + field +
                                 "' is not key=value");
            }
            const std::string_view key(field.data(), eq);
            const std::string_view value(field.data() + eq + 1, field.size() - eq - 1);
            if (key == "q") {
                std::size_t start = 0;
                while (start <= value.size()) {
                    const auto comma = value.find(',', start);
                    const auto stop = comma == std::string_view::npos ? value.size() : comma;
                    gate.qubits.push_back(parse_number<int>(value.substr(start, stop - start),
                                                            line_no));
                    start = stop + 1;
                }
                have_q = true;
            } else if (key == "d") {
                gate.depth = parse_number<int>(value, line_no);
                have_d = true;
            } else if (key == "e") {
                cost = parse_double(value, line_no);
                any_cost = true;
            } else {
                throw ParseError("line " + std::to_string(line_no) + ": unknown field '" +
                                 std::string(key) + "'");
            }
        }
        if (!have_q || !have_d) {
            throw ParseError("line " + std::to_string(line_no) + ": gate needs q= and d=");
        }
        gates.push_back(std::move(gate));
        costs.push_back(cost);
    }
    if (!any_cost) {
        costs.clear();
    }
    return Hypergraph::from_circuit(std::move(gates), costs);
}

Hypergraph parse_circuit_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &err) {
        throw ParseError(std::string("circuit JSON: ") + err.what());
    }
    if (!doc.is_object() || !doc.contains("gates") || !doc["gates"].is_array()) {
        throw ParseError("circuit JSON must be an object with a 'gates' array");
    }
    std::vector<Gate> gates;
    std::vector<double> costs;
    bool any_cost = false;
    try {
        for (const auto &item : doc["gates"]) {
            Gate gate;
            const auto &id = item.at("id");
            gate.id = id.is_string() ? id.get<std::string>() : id.dump();
            gate.qubits = item.at("q").get<std::vector<int>>();
            gate.depth = item.at("d").get<int>();
            double cost = 1.0;
            if (item.contains("e")) {
                cost = item["e"].get<double>();
                any_cost = true;
            }
            gates.push_back(std::move(gate));
            costs.push_back(cost);
        }
    } catch (const nlohmann::json::exception &err) {
        throw ParseError(std::string("circuit JSON: ") + err.what());
    }
    if (!any_cost) {
        costs.clear();
    }
    return Hypergraph::from_circuit(std::move(gates), costs);
}

Hypergraph load_circuit(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read circuit file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (path.extension() == ".json") {
        return parse_circuit_json(buffer.str());
    }
    return parse_circuit_text(buffer.str());
}

} // namespace maestrocut::cutgraph
