// Copyright 2026 The tnsim Authors
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

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "tnsim/circuit.hpp"
#include "tnsim/error.hpp"

namespace tnsim {

namespace {

constexpr int kCircuitFormatVersion = 1;

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string &what) {
    throw Error(ErrorCode::ParseError, what);
}

}  // namespace

std::string circuit_to_json(const Circuit &circuit) {
    json gates = json::array();
    for (const Gate &g : circuit.gates()) {
        gates.push_back(json{{"name", gate_name(g.kind)}, {"qubits", g.qubits}, {"params", g.params}});
    }
    json doc{{"version", kCircuitFormatVersion}, {"num_qubits", circuit.num_qubits()}, {"gates", std::move(gates)}};
    return doc.dump(1) + "\n";
}

Circuit circuit_from_json(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        parse_fail("malformed circuit file at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) {
        parse_fail("circuit file must hold an object");
    }
    if (!doc.contains("version") || !doc["version"].is_number_integer()) {
        parse_fail("missing integer field 'version'");
    }
    if (doc["version"].get<int>() != kCircuitFormatVersion) {
        throw Error(ErrorCode::VersionMismatch,
                    "circuit format version " + doc["version"].dump() + " is not supported (expected 1)");
    }
    if (!doc.contains("num_qubits") || !doc["num_qubits"].is_number_unsigned()) {
        parse_fail("missing non-negative integer field 'num_qubits'");
    }
    if (!doc.contains("gates") || !doc["gates"].is_array()) {
        parse_fail("missing array field 'gates'");
    }
    Circuit circuit(doc["num_qubits"].get<std::size_t>());
    std::size_t index = 0;
    for (const json &entry : doc["gates"]) {
        const std::string where = "gate #" + std::to_string(index++);
        if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string()) {
            parse_fail(where + ": missing string field 'name'");
        }
        const std::string name = entry["name"].get<std::string>();
        GateKind kind;
        try {
            kind = gate_kind_from_name(name);
        } catch (const Error &) {
            parse_fail(where + ": unknown gate '" + name + "'");
        }
        Gate g;
        g.kind = kind;
        try {
            g.qubits = entry.at("qubits").get<std::vector<std::size_t>>();
            if (entry.contains("params")) {
                g.params = entry["params"].get<std::vector<double>>();
            }
        } catch (const json::exception &e) {
            parse_fail(where + " (" + name + "): " + e.what());
        }
        try {
            circuit.add(std::move(g));
        } catch (const Error &e) {
            parse_fail(where + " (" + name + "): " + e.what());
        }
    }
    return circuit;
}

void write_circuit(const Circuit &circuit, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    }
    out << circuit_to_json(circuit);
    if (!out) {
        throw Error(ErrorCode::Io, "failed writing " + path.string());
    }
}

Circuit read_circuit(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return circuit_from_json(buf.str());
}

}  // namespace tnsim
