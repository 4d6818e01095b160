#pragma once

// JSON documents for codes:
//   {"kind": "strategic"|"static", "dims": {...}, "encoder": {...}, "checks": [...], "decoders": [...]}
// Each Choi block is {"in_dims", "out_dims", "rows", "cols", "data"} with "data" the
// row-major list of [re, im] pairs. Check blocks also carry their round index.

#include <string>
#include <vector>

#include "adqec/code_model.hpp"

namespace adqec {

struct CodeDocument {
  bool is_static = false;
  StrategicCode code;
  /// Non-fatal findings (for instance a block that is not PSD).
  std::vector<std::string> warnings;

  StaticCode as_static() const;
};

std::string to_json(const StrategicCode& code, int indent = 1);
std::string to_json(const StaticCode& code, int indent = 1);
/// A list of decoder blocks, e.g. a recovery family.
std::string decoders_to_json(const std::vector<ChoiOperator>& decoders, int indent = 1);

/// Throws FormatError on malformed documents or inconsistent dims.
CodeDocument parse_code(const std::string& text);
std::vector<ChoiOperator> parse_decoders(const std::string& text);

CodeDocument load_code(const std::string& path);
void save_text(const std::string& path, const std::string& text);

}  // namespace adqec
