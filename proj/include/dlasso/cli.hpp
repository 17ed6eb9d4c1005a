#pragma once

namespace dlasso::cli {

// Parses argv and runs one subcommand (simulate | fit | infer | experiment).
// Returns the process exit code: 0 success, 2 validation error, 1 runtime
// error. Error names go to stderr in machine-parsable form.
int dispatch(int argc, const char* const* argv);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dlasso::cli
