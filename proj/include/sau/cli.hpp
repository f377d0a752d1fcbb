#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sau/errors.hpp"

namespace sau::cli {

enum ExitCode : int {
  kExitPass = 0,
  kExitVerifyFailed = 1,
  kExitDomain = 2,
  kExitIo = 3,
  kExitParse = 4,
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Runs the command line (args excludes the program name). Artifacts and
// summaries go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace sau::cli
