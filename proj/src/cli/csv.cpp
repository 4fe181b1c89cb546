#include "cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace amf::cli {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string trimmed(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return s.substr(a, b - a);
}

std::optional<double> parse_number(const std::string& raw) {
    const std::string s = trimmed(raw);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;  // inf/nan cells count as non-numeric
    return v;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_col) {
    std::ifstream in(path);
    if (!in) throw CliError(2, "cannot open data file: " + path);

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trimmed(line).empty()) continue;
        rows.push_back(split_fields(line));
    }
    if (rows.empty()) throw CliError(2, path + ": no data rows");

    const std::size_t n_cols = rows[0].size();
    if (n_cols < 2) throw CliError(2, path + ": need at least two columns (features and label)");

    // Header row: any non-numeric cell on the first line.
    bool has_header = false;
    for (const std::string& cell : rows[0])
        if (!parse_number(cell)) { has_header = true; break; }

    Dataset ds;
    std::size_t first_data_row = 0;
    if (has_header) {
        for (const std::string& cell : rows[0]) ds.header.push_back(trimmed(cell));
        first_data_row = 1;
        if (rows.size() == 1) throw CliError(2, path + ": header but no data rows");
    }

    // Resolve the label column: integer index (negative from the end) or name.
    std::size_t label_idx;
    {
        const std::string want = trimmed(label_col);
        int idx = 0;
        const auto [ptr, ec] = std::from_chars(want.data(), want.data() + want.size(), idx);
        if (ec == std::errc() && ptr == want.data() + want.size()) {
            const long resolved = idx < 0 ? static_cast<long>(n_cols) + idx : idx;
            if (resolved < 0 || resolved >= static_cast<long>(n_cols))
                throw CliError(2, "label column " + want + " out of range for " +
                                      std::to_string(n_cols) + " columns");
            label_idx = static_cast<std::size_t>(resolved);
        } else {
            if (!has_header)
                throw CliError(2, "label column name '" + want + "' requires a header row");
            std::size_t found = n_cols;
            for (std::size_t c = 0; c < ds.header.size(); ++c)
                if (ds.header[c] == want) { found = c; break; }
            if (found == n_cols) throw CliError(2, "label column '" + want + "' not in header");
            label_idx = found;
        }
    }

    for (std::size_t r = first_data_row; r < rows.size(); ++r) {
        const auto& fields = rows[r];
        if (fields.size() != n_cols) {
            std::ostringstream msg;
            msg << path << ": row " << (r + 1) << ": expected " << n_cols << " columns, got "
                << fields.size();
            throw CliError(2, msg.str());
        }
        Sample s;
        s.x.reserve(n_cols - 1);
        for (std::size_t c = 0; c < n_cols; ++c) {
            const auto v = parse_number(fields[c]);
            if (!v) {
                std::ostringstream msg;
                msg << path << ": row " << (r + 1) << ", column " << (c + 1)
                    << ": non-numeric value '" << trimmed(fields[c]) << "'";
                throw CliError(3, msg.str());
            }
            if (c == label_idx)
                s.y = *v;
            else
                s.x.push_back(*v);
        }
        ds.stream.push_back(std::move(s));
    }
    return ds;
}

}  // namespace amf::cli
