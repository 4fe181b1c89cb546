#pragma once

namespace amf::cli {

// Full command-line entry point (argument parsing, data loading, command
// dispatch). Returns the process exit code: 0 success, 1 failed check,
// 2 bad arguments or file format, 3 non-numeric data, 4 degenerate labels.
int cli_main(int argc, const char* const* argv);

}  // namespace amf::cli
