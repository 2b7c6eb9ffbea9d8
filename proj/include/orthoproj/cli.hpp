#pragma once

#include <string>
#include <vector>

namespace orthoproj::cli {

struct RunOutput {
  int exit_code = 0;
  std::string out;  // primary artifact when no --out is given
  std::string err;  // error JSON or help text
};

/// Runs one command line; args exclude the program name.
RunOutput run(const std::vector<std::string>& args);

}  // namespace orthoproj::cli
