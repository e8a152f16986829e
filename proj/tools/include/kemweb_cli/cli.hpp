#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace kemweb::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kUsageOrParse = 2,
  kNumeric = 3,
};

/// Runs one command line (without the program name). Reports go to `out`,
/// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Names accepted by the example command; "euclidean-N" stands for N = 1..9.
std::vector<std::string> example_names();

/// Text of a built-in example, or nothing for an unknown name.
std::optional<std::string> example_text(const std::string& name);

}  // namespace kemweb::cli
