#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace adqec::cli {

enum ExitCode { kOk = 0, kUsage = 2, kValidation = 3, kSolver = 4, kBudget = 5 };

/// Runs one qecopt invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "a:b:s" (inclusive), "a,b,c" or a single value.
std::vector<double> parse_gammas(const std::string& spec);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;  // NaN entries are skipped
};

/// Line chart on a fixed 800x500 canvas.
std::string svg_chart(const std::vector<Series>& series, const std::string& x_label, const std::string& y_label);

std::string sha256_file(const std::string& path);

}  // namespace adqec::cli
