#pragma once

// Internal helpers for the CSV formats: exact number formatting and a small
// line-oriented reader that reports file:line on errors.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mlnet/error.hpp"

namespace mlnet::textio {

/// Shortest representation that parses back to the identical double.
inline std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw Error(ErrorCode::InvalidArgument, "cannot format number");
    return std::string(buf, end);
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Reads a header-led CSV file. The callback receives the split fields and
/// the 1-based line number of every non-empty data row.
class CsvReader {
public:
    explicit CsvReader(std::filesystem::path path) : path_(std::move(path)), in_(path_) {
        if (!in_) throw Error(ErrorCode::IoError, "cannot open " + path_.string());
    }

    const std::filesystem::path& path() const noexcept { return path_; }

    std::vector<std::string> header() {
        std::string line;
        if (!std::getline(in_, line)) fail(1, "missing header row");
        line_no_ = 1;
        if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        std::vector<std::string> cols;
        for (auto f : split(trim(line))) cols.emplace_back(trim(f));
        return cols;
    }

    template <class F>
    void rows(F&& on_row) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            const std::string_view t = trim(line);
            if (t.empty()) continue;
            auto fields = split(t);
            for (auto& f : fields) f = trim(f);
            on_row(fields, line_no_);
        }
    }

    [[noreturn]] void fail(std::size_t line, const std::string& what) const {
        throw Error(ErrorCode::ParseError,
                    path_.string() + ":" + std::to_string(line) + ": " + what);
    }

    double number(std::string_view field, std::size_t line) const {
        double x = 0.0;
        const char* first = field.data();
        const char* last = field.data() + field.size();
        if (field.empty()) fail(line, "empty numeric field");
        auto [ptr, ec] = std::from_chars(first, last, x);
        if (ec != std::errc{} || ptr != last)
            fail(line, "invalid number '" + std::string(field) + "'");
        return x;
    }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t line_no_ = 0;
};

}  // namespace mlnet::textio
