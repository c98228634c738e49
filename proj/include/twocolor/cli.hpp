#pragma once

namespace twocolor {

// Entry point for the twocolor command-line tool. Exit codes: 0 success,
// 1 runtime/solver failure, 2 usage or configuration errors.
int run_cli(int argc, const char* const* argv);

}  // namespace twocolor
