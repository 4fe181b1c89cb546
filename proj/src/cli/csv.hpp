#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "amf/types.hpp"

namespace amf::cli {

// Command failure carrying the process exit code:
// 1 failed check, 2 bad arguments or file format, 3 non-numeric data,
// 4 degenerate labels.
class CliError : public std::runtime_error {
public:
    CliError(int exit_code, const std::string& message)
        : std::runtime_error(message), exit_code_(exit_code) {}
    int exit_code() const { return exit_code_; }

private:
    int exit_code_;
};

struct Dataset {
    Stream stream;                    // features + label per row
    std::vector<std::string> header;  // empty when the file has none
};

// Comma-separated numeric file, one sample per row. A header row is detected
// when any first-row cell fails to parse as a number. label_col is either an
// integer index (negative counts from the end, default -1) or a column name,
// which requires a header. Malformed structure exits 2, non-numeric data
// cells exit 3.
Dataset load_csv(const std::string& path, const std::string& label_col);

}  // namespace amf::cli
