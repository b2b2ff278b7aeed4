#pragma once

namespace chanfront {

// Entry point of the chanfront command-line tool. Exit codes: 0 success,
// 1 numerical/runtime failure, 2 usage error.
int cli_main(int argc, const char* const* argv);

} // namespace chanfront
