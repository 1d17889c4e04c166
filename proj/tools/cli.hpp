#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spinqrf::cli {

/// Exit codes: 0 success, 1 input error, 2 unsupported/domain error,
/// 3 verification failure.
enum ExitCode : int { kOk = 0, kInputError = 1, kDomainError = 2, kVerificationFailure = 3 };

/// Runs the command line (without the program name) writing to the given streams.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spinqrf::cli
