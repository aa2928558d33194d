#pragma once

namespace hdfl {

/// Full command-line entry point. Exit codes: 0 success, 2 usage error,
/// 3 data error, 4 numeric failure. Kept in the library so tests can invoke
/// subcommands in-process.
int cli_main(int argc, const char* const* argv);

} // namespace hdfl
