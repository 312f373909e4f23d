#pragma once

namespace hrisk::cli {

/// Exit codes: 0 success, 1 unexpected failure, 2 configuration or usage
/// error, 3 numerical diagnostic.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiagnostic = 3;

int run(int argc, char** argv);

}  // namespace hrisk::cli
