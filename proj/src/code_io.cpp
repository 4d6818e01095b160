#include "adqec/code_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adqec/errors.hpp"

namespace adqec {

using nlohmann::json;

namespace {

constexpr double kPsdWarn = -1e-8;

json dims_json(const DimList& d) { return json(std::vector<Index>(d.begin(), d.end())); }

json block_json(const ChoiOperator& c) {
  json data = json::array();
  for (Index i = 0; i < c.matrix.rows(); ++i)
    for (Index j = 0; j < c.matrix.cols(); ++j) data.push_back({c.matrix(i, j).real(), c.matrix(i, j).imag()});
  return {{"in_dims", dims_json(c.in_dims)},
          {"out_dims", dims_json(c.out_dims)},
          {"rows", c.matrix.rows()},
          {"cols", c.matrix.cols()},
          {"data", std::move(data)}};
}

DimList read_dims(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw FormatError(std::string(what) + ": expected a nonempty list of dims");
  DimList out;
  for (const auto& x : j) {
    if (!x.is_number_integer() || x.get<long long>() < 1) throw FormatError(std::string(what) + ": dims must be positive integers");
    out.push_back(x.get<Index>());
  }
  return out;
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing \"" + key + "\"");
  return j.at(key);
}

ChoiOperator read_block(const json& j, const std::string& where, std::vector<std::string>& warnings) {
  const DimList in = read_dims(field(j, "in_dims", where), (where + ".in_dims").c_str());
  const DimList out = read_dims(field(j, "out_dims", where), (where + ".out_dims").c_str());
  const json& rj = field(j, "rows", where);
  const json& cj = field(j, "cols", where);
  if (!rj.is_number_integer() || !cj.is_number_integer()) throw FormatError(where + ": rows and cols must be integers");
  const Index rows = rj.get<Index>(), cols = cj.get<Index>();
  const Index d = dim_product(in) * dim_product(out);
  if (rows != d || cols != d)
    throw FormatError(where + ": matrix is " + std::to_string(rows) + "x" + std::to_string(cols) +
                      " but dims multiply to " + std::to_string(d));
  const json& data = field(j, "data", where);
  if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols)
    throw FormatError(where + ": data must hold rows*cols entries");
  CMatrix m(rows, cols);
  Index k = 0;
  for (const auto& e : data) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw FormatError(where + ": entries must be [re, im] pairs");
    m(k / cols, k % cols) = Complex(e[0].get<double>(), e[1].get<double>());
    ++k;
  }
  if (hermiticity_error(m) > 1e-8)
    warnings.push_back(where + ": not Hermitian");
  else if (min_eigenvalue(m) < kPsdWarn)
    warnings.push_back(where + ": not positive semidefinite");
  return ChoiOperator(std::move(m), in, out);
}

json code_json(const StrategicCode& code, bool is_static) {
  json checks = json::array();
  for (std::size_t r = 0; r < code.rounds.size(); ++r)
    for (const auto& c : code.rounds[r]) {
      json b = block_json(c);
      b["round"] = r;
      checks.push_back(std::move(b));
    }
  json decs = json::array();
  for (const auto& d : code.decoders) decs.push_back(block_json(d));
  return {{"kind", is_static ? "static" : "strategic"},
          {"dims",
           {{"logical", dims_json(code.encoder.in_dims)},
            {"physical", dims_json(code.encoder.out_dims)},
            {"output", dims_json(code.decoders.at(0).out_dims)},
            {"outcome_counts", code.outcome_counts}}},
          {"encoder", block_json(code.encoder)},
          {"checks", std::move(checks)},
          {"decoders", std::move(decs)}};
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("not valid JSON: ") + e.what());
  }
}

}  // namespace

StaticCode CodeDocument::as_static() const {
  if (!is_static) throw FormatError("document holds a strategic code, not a static one");
  return {code.encoder, code.decoders.at(0)};
}

std::string to_json(const StrategicCode& code, int indent) { return code_json(code, false).dump(indent); }

std::string to_json(const StaticCode& code, int indent) { return code_json(code.as_strategic(), true).dump(indent); }

std::string decoders_to_json(const std::vector<ChoiOperator>& decoders, int indent) {
  json decs = json::array();
  for (const auto& d : decoders) decs.push_back(block_json(d));
  return json{{"decoders", std::move(decs)}}.dump(indent);
}

CodeDocument parse_code(const std::string& text) {
  const json doc = parse_text(text);
  CodeDocument out;
  const json& kind = field(doc, "kind", "document");
  if (kind != "strategic" && kind != "static") throw FormatError("document: kind must be \"strategic\" or \"static\"");
  out.is_static = kind == "static";

  const json& dims = field(doc, "dims", "document");
  const DimList logical = read_dims(field(dims, "logical", "dims"), "dims.logical");
  const DimList physical = read_dims(field(dims, "physical", "dims"), "dims.physical");
  const DimList output = read_dims(field(dims, "output", "dims"), "dims.output");
  std::vector<int> counts;
  if (dims.contains("outcome_counts")) {
    if (!dims["outcome_counts"].is_array()) throw FormatError("dims.outcome_counts must be a list");
    for (const auto& c : dims["outcome_counts"]) {
      if (!c.is_number_integer() || c.get<int>() < 1) throw FormatError("dims.outcome_counts must be positive integers");
      counts.push_back(c.get<int>());
    }
  }

  StrategicCode& code = out.code;
  code.encoder = read_block(field(doc, "encoder", "document"), "encoder", out.warnings);
  if (code.encoder.in_dims != logical || code.encoder.out_dims != physical)
    throw FormatError("encoder dims disagree with the dims section");

  const json& checks = field(doc, "checks", "document");
  if (!checks.is_array()) throw FormatError("checks must be a list");
  code.outcome_counts = counts;
  code.rounds.resize(counts.size());
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string where = "checks[" + std::to_string(i) + "]";
    const json& r = field(checks[i], "round", where);
    if (!r.is_number_integer() || r.get<long long>() < 0 || r.get<std::size_t>() >= counts.size())
      throw FormatError(where + ": round out of range");
    code.rounds[r.get<std::size_t>()].push_back(read_block(checks[i], where, out.warnings));
  }
  if (out.is_static && !counts.empty()) throw FormatError("a static code has no check rounds");

  const json& decs = field(doc, "decoders", "document");
  if (!decs.is_array() || decs.empty()) throw FormatError("decoders must be a nonempty list");
  for (std::size_t i = 0; i < decs.size(); ++i)
    code.decoders.push_back(read_block(decs[i], "decoders[" + std::to_string(i) + "]", out.warnings));
  for (const auto& d : code.decoders)
    if (d.out_dims != output) throw FormatError("decoder output dims disagree with the dims section");

  try {
    check_dims(code);
  } catch (const DimensionError& e) {
    throw FormatError(std::string("blocks do not chain: ") + e.what());
  }
  return out;
}

std::vector<ChoiOperator> parse_decoders(const std::string& text) {
  const json doc = parse_text(text);
  const json& decs = field(doc, "decoders", "document");
  if (!decs.is_array()) throw FormatError("decoders must be a list");
  std::vector<std::string> warnings;
  std::vector<ChoiOperator> out;
  for (std::size_t i = 0; i < decs.size(); ++i) out.push_back(read_block(decs[i], "decoders[" + std::to_string(i) + "]", warnings));
  return out;
}

CodeDocument load_code(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_code(buf.str());
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

}  // namespace adqec
