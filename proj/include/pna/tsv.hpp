#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "pna/error.hpp"

namespace pna {

// Line-oriented TSV reader. Skips '#' comment lines and blank lines, keeps
// track of 1-based line numbers for error messages.
class TsvReader {
public:
    explicit TsvReader(const std::filesystem::path& path) : path_(path), in_(path) {
        if (!in_) throw DataError("cannot open file: " + path.string());
    }

    // Next data line split on tabs; false at EOF.
    bool next(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            fields.clear();
            std::size_t start = 0;
            while (true) {
                std::size_t tab = line.find('\t', start);
                if (tab == std::string::npos) {
                    fields.push_back(line.substr(start));
                    break;
                }
                fields.push_back(line.substr(start, tab - start));
                start = tab + 1;
            }
            return true;
        }
        return false;
    }

    // Same but splitting on any whitespace run; for integer-only files.
    bool next_ws(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t i = 0;
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
            if (i == line.size() || line[i] == '#') continue;
            fields.clear();
            while (i < line.size()) {
                std::size_t j = i;
                while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
                fields.emplace_back(line.substr(i, j - i));
                i = j;
                while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
            }
            return true;
        }
        return false;
    }

    std::size_t line() const { return line_; }
    const std::filesystem::path& path() const { return path_; }

    [[noreturn]] void fail(const std::string& what) const {
        throw DataError(path_.string() + ":" + std::to_string(line_) + ": " + what);
    }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t line_ = 0;
};

inline std::int64_t parse_int(const TsvReader& r, std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw DataError(r.path().string() + ":" + std::to_string(r.line()) +
                        ": expected integer, got '" + std::string(s) + "'");
    return v;
}

inline double parse_double(const TsvReader& r, std::string_view s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw DataError(r.path().string() + ":" + std::to_string(r.line()) +
                        ": expected number, got '" + std::string(s) + "'");
    return v;
}

// Shortest decimal representation that round-trips exactly.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path.string());
    return out;
}

}  // namespace pna
