// Copyright 2026 The qproc developers
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

#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qproc/process.hpp"

namespace qproc {

using Json = nlohmann::json;

inline constexpr const char* kDocumentVersion = "1";

// UTF-8 JSON scenario documents. Complex numbers are [real, imaginary]
// pairs, matrices are row-major nested arrays, unknown fields are
// rejected. The same schema is read and written, so documents round-trip
// bit-exactly.

namespace io_detail {

inline void reject_unknown(const Json& j,
                           std::initializer_list<const char*> allowed,
                           const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known)
      throw ParseError(where + ": unknown field '" + key + "'");
  }
}

inline const Json& require_field(const Json& j, const char* field,
                                 const std::string& where) {
  const auto it = j.find(field);
  if (it == j.end())
    throw ParseError(where + ": missing field '" + field + "'");
  return *it;
}

inline std::string get_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected a string");
  return j.get<std::string>();
}

inline Index get_dimension(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 1)
    throw ParseError(where + ": expected a positive integer");
  return static_cast<Index>(j.get<long long>());
}

inline Complex get_complex(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(where + ": expected a [real, imaginary] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

}  // namespace io_detail

inline ComplexMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ParseError(where + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty())
    throw ParseError(where + "[0]: expected a non-empty row");
  const std::size_t cols = j[0].size();
  ComplexMatrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols)
      throw ParseError(row_where + ": rows must all have " +
                       std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) = io_detail::get_complex(
          j[r][c], row_where + "[" + std::to_string(c) + "]");
  }
  if (!all_finite(m)) throw ParseError(where + ": non-finite entries");
  return m;
}

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c)
      row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

struct ProcessSpec {
  enum class Kind { Matrix, State, IdentityChannel, Spacelike };
  Kind kind = Kind::Matrix;
  ComplexMatrix operand;  // the process matrix itself, or the constructor's ρ
};

struct ScenarioDocument {
  std::string version = kDocumentVersion;
  std::vector<Region> regions;
  std::vector<Instrument> instruments;          // one per region, or empty
  std::vector<std::string> instrument_names;    // parallel to instruments
  std::optional<ProcessSpec> process_spec;

  bool has_instruments() const { return !instruments.empty(); }

  ProcessMatrix build_process() const {
    if (!process_spec)
      throw PreconditionError("scenario document has no process");
    switch (process_spec->kind) {
      case ProcessSpec::Kind::Matrix:
        return ProcessMatrix(regions, process_spec->operand);
      case ProcessSpec::Kind::State:
        if (regions.size() != 1 || regions[0].d_out != 1)
          throw ParseError(
              "process.constructor 'state' needs exactly one region with "
              "d_out = 1");
        return state_process(process_spec->operand, regions[0].label);
      case ProcessSpec::Kind::IdentityChannel:
        if (regions.size() < 2)
          throw ParseError(
              "process.constructor 'identity_channel' needs at least two "
              "regions");
        return sequential_identity_process(process_spec->operand, regions);
      case ProcessSpec::Kind::Spacelike:
        if (regions.size() != 2 || regions[0].d_out != 1 ||
            regions[1].d_out != 1)
          throw ParseError(
              "process.constructor 'spacelike' needs two regions with "
              "d_out = 1");
        return spacelike_process(process_spec->operand, regions[0].d_in,
                                 regions[1].d_in, regions[0].label,
                                 regions[1].label);
    }
    throw ParseError("process: unknown constructor");
  }

  // The initial density matrix, when the process is built from one.
  std::optional<ComplexMatrix> initial_state() const {
    if (process_spec && (process_spec->kind == ProcessSpec::Kind::State ||
                         process_spec->kind == ProcessSpec::Kind::IdentityChannel))
      return process_spec->operand;
    return std::nullopt;
  }

  Scenario to_scenario() const {
    if (!has_instruments())
      throw PreconditionError("scenario document has no instruments");
    std::optional<ProcessMatrix> process;
    if (process_spec) process = build_process();
    return Scenario(instruments, std::move(process));
  }
};

inline ScenarioDocument parse_scenario(const Json& j) {
  if (!j.is_object()) throw ParseError("document: expected a JSON object");
  io_detail::reject_unknown(j, {"version", "regions", "instruments", "process"},
                            "document");
  ScenarioDocument doc;
  doc.version = io_detail::get_string(
      io_detail::require_field(j, "version", "document"), "version");
  if (doc.version != kDocumentVersion)
    throw ParseError("version: unsupported version '" + doc.version +
                     "', expected '" + kDocumentVersion + "'");

  const Json& regions = io_detail::require_field(j, "regions", "document");
  if (!regions.is_array() || regions.empty())
    throw ParseError("regions: expected a non-empty array");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::string where = "regions[" + std::to_string(i) + "]";
    const Json& jr = regions[i];
    if (!jr.is_object()) throw ParseError(where + ": expected an object");
    io_detail::reject_unknown(jr, {"label", "d_in", "d_out"}, where);
    Region r;
    r.label = io_detail::get_string(
        io_detail::require_field(jr, "label", where), where + ".label");
    r.d_in = io_detail::get_dimension(
        io_detail::require_field(jr, "d_in", where), where + ".d_in");
    r.d_out = io_detail::get_dimension(
        io_detail::require_field(jr, "d_out", where), where + ".d_out");
    for (const Region& other : doc.regions)
      if (other.label == r.label)
        throw ParseError(where + ": duplicate region label '" + r.label + "'");
    doc.regions.push_back(std::move(r));
  }

  if (j.contains("instruments")) {
    const Json& instruments = j["instruments"];
    if (!instruments.is_array())
      throw ParseError("instruments: expected an array");
    std::vector<std::optional<Instrument>> by_region(doc.regions.size());
    std::vector<std::string> names(doc.regions.size());
    for (std::size_t i = 0; i < instruments.size(); ++i) {
      const std::string where = "instruments[" + std::to_string(i) + "]";
      const Json& ji = instruments[i];
      if (!ji.is_object()) throw ParseError(where + ": expected an object");
      io_detail::reject_unknown(ji, {"region", "name", "maps"}, where);
      const std::string region_label = io_detail::get_string(
          io_detail::require_field(ji, "region", where), where + ".region");
      std::size_t region_index = doc.regions.size();
      for (std::size_t r = 0; r < doc.regions.size(); ++r)
        if (doc.regions[r].label == region_label) region_index = r;
      if (region_index == doc.regions.size())
        throw ParseError(where + ".region: no region labelled '" +
                         region_label + "'");
      if (by_region[region_index])
        throw ParseError(where + ": region '" + region_label +
                         "' already has an instrument");
      const Region& region = doc.regions[region_index];

      const Json& maps = io_detail::require_field(ji, "maps", where);
      if (!maps.is_array() || maps.empty())
        throw ParseError(where + ".maps: expected a non-empty array");
      std::vector<QuantumMap> elements;
      std::vector<std::string> outcomes;
      for (std::size_t k = 0; k < maps.size(); ++k) {
        const std::string map_where =
            where + ".maps[" + std::to_string(k) + "]";
        const Json& jm = maps[k];
        if (!jm.is_object())
          throw ParseError(map_where + ": expected an object");
        io_detail::reject_unknown(jm, {"outcome", "kraus", "choi"}, map_where);
        outcomes.push_back(
            jm.contains("outcome")
                ? io_detail::get_string(jm["outcome"], map_where + ".outcome")
                : std::to_string(k));
        const bool has_kraus = jm.contains("kraus");
        const bool has_choi = jm.contains("choi");
        if (has_kraus == has_choi)
          throw ParseError(map_where +
                           ": needs exactly one of 'kraus' or 'choi'");
        try {
          if (has_kraus) {
            const Json& jk = jm["kraus"];
            if (!jk.is_array())
              throw ParseError(map_where + ".kraus: expected an array");
            std::vector<ComplexMatrix> kraus;
            for (std::size_t op = 0; op < jk.size(); ++op)
              kraus.push_back(matrix_from_json(
                  jk[op], map_where + ".kraus[" + std::to_string(op) + "]"));
            elements.emplace_back(region, std::move(kraus));
          } else {
            elements.emplace_back(
                region, matrix_from_json(jm["choi"], map_where + ".choi"));
          }
        } catch (const ShapeError& e) {
          throw ParseError(map_where + ": " + e.what());
        }
      }
      std::string name;
      if (ji.contains("name"))
        name = io_detail::get_string(ji["name"], where + ".name");
      by_region[region_index] =
          Instrument(std::move(elements), std::move(outcomes));
      names[region_index] = std::move(name);
    }
    if (!instruments.empty()) {
      for (std::size_t r = 0; r < doc.regions.size(); ++r)
        if (!by_region[r])
          throw ParseError("instruments: region '" + doc.regions[r].label +
                           "' has no instrument");
      for (std::size_t r = 0; r < doc.regions.size(); ++r)
        doc.instruments.push_back(std::move(*by_region[r]));
      doc.instrument_names = std::move(names);
    }
  }

  if (j.contains("process")) {
    const Json& jp = j["process"];
    if (!jp.is_object()) throw ParseError("process: expected an object");
    io_detail::reject_unknown(jp, {"matrix", "constructor", "rho"}, "process");
    ProcessSpec spec;
    if (jp.contains("matrix")) {
      if (jp.contains("constructor") || jp.contains("rho"))
        throw ParseError(
            "process: give either 'matrix' or a 'constructor' with 'rho'");
      spec.kind = ProcessSpec::Kind::Matrix;
      spec.operand = matrix_from_json(jp["matrix"], "process.matrix");
    } else {
      const std::string ctor = io_detail::get_string(
          io_detail::require_field(jp, "constructor", "process"),
          "process.constructor");
      if (ctor == "state")
        spec.kind = ProcessSpec::Kind::State;
      else if (ctor == "identity_channel")
        spec.kind = ProcessSpec::Kind::IdentityChannel;
      else if (ctor == "spacelike")
        spec.kind = ProcessSpec::Kind::Spacelike;
      else
        throw ParseError("process.constructor: unknown constructor '" + ctor +
                         "'");
      spec.operand = matrix_from_json(
          io_detail::require_field(jp, "rho", "process"), "process.rho");
    }
    doc.process_spec = std::move(spec);
  }

  // Surface structural problems (bad shapes, broken chains) at parse time.
  if (doc.process_spec) {
    try {
      const ProcessMatrix w = doc.build_process();
      if (doc.has_instruments()) doc.to_scenario();
      (void)w;
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(std::string("process: ") + e.what());
    }
  }
  return doc;
}

inline ScenarioDocument load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read file: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parse_scenario(j);
}

inline Json scenario_to_json(const ScenarioDocument& doc) {
  Json j;
  j["version"] = doc.version;
  Json regions = Json::array();
  for (const Region& r : doc.regions) {
    Json jr;
    jr["label"] = r.label;
    jr["d_in"] = r.d_in;
    jr["d_out"] = r.d_out;
    regions.push_back(std::move(jr));
  }
  j["regions"] = std::move(regions);

  if (doc.has_instruments()) {
    Json instruments = Json::array();
    for (std::size_t i = 0; i < doc.instruments.size(); ++i) {
      const Instrument& instrument = doc.instruments[i];
      Json ji;
      ji["region"] = instrument.region().label;
      if (i < doc.instrument_names.size() && !doc.instrument_names[i].empty())
        ji["name"] = doc.instrument_names[i];
      Json maps = Json::array();
      for (std::size_t k = 0; k < instrument.size(); ++k) {
        Json jm;
        jm["outcome"] = instrument.outcomes()[k];
        const QuantumMap& m = instrument.elements()[k];
        if (m.has_kraus()) {
          Json kraus = Json::array();
          for (const ComplexMatrix& op : m.kraus())
            kraus.push_back(matrix_to_json(op));
          jm["kraus"] = std::move(kraus);
        } else {
          jm["choi"] = matrix_to_json(m.choi());
        }
        maps.push_back(std::move(jm));
      }
      ji["maps"] = std::move(maps);
      instruments.push_back(std::move(ji));
    }
    j["instruments"] = std::move(instruments);
  }

  if (doc.process_spec) {
    Json jp;
    switch (doc.process_spec->kind) {
      case ProcessSpec::Kind::Matrix:
        jp["matrix"] = matrix_to_json(doc.process_spec->operand);
        break;
      case ProcessSpec::Kind::State:
        jp["constructor"] = "state";
        jp["rho"] = matrix_to_json(doc.process_spec->operand);
        break;
      case ProcessSpec::Kind::IdentityChannel:
        jp["constructor"] = "identity_channel";
        jp["rho"] = matrix_to_json(doc.process_spec->operand);
        break;
      case ProcessSpec::Kind::Spacelike:
        jp["constructor"] = "spacelike";
        jp["rho"] = matrix_to_json(doc.process_spec->operand);
        break;
    }
    j["process"] = std::move(jp);
  }
  return j;
}

// Document holding a bare process (no instruments), as emitted by the
// update and reconstruction commands.
inline ScenarioDocument process_document(const ProcessMatrix& w) {
  ScenarioDocument doc;
  doc.regions = w.regions();
  doc.process_spec =
      ProcessSpec{ProcessSpec::Kind::Matrix, w.matrix()};
  return doc;
}

}  // namespace qproc
