#ifndef OPTIQ_CLI_H
#define OPTIQ_CLI_H

#include <ostream>
#include <string>
#include <vector>

namespace optiq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitInvariantViolation = 3;

/// Runs one command line (args excludes the program name). Results go to
/// `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace optiq::cli

#endif
