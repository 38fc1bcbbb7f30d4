#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bertdetect/errors.hpp"

namespace bertdetect::csv {

// RFC-4180 record reader. Quoted fields may contain commas, doubled quotes
// and line breaks; records end at an unquoted LF or CRLF. Record numbers are
// 1-based with the header as record 1.
class Reader {
public:
    explicit Reader(std::string content) : content_(std::move(content)) {
        if (content_.size() >= 3 && content_.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            pos_ = 3;  // skip UTF-8 BOM
        }
    }

    static Reader from_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot open file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return Reader(ss.str());
    }

    // Reads the next record into `fields`. Returns false at end of input.
    bool next(std::vector<std::string>& fields) {
        fields.clear();
        if (pos_ >= content_.size()) return false;
        ++record_;
        std::string field;
        bool quoted = false;
        bool at_field_start = true;
        while (pos_ < content_.size()) {
            const char c = content_[pos_];
            if (quoted) {
                if (c == '"') {
                    if (pos_ + 1 < content_.size() && content_[pos_ + 1] == '"') {
                        field.push_back('"');
                        pos_ += 2;
                    } else {
                        quoted = false;
                        ++pos_;
                        if (pos_ < content_.size() && content_[pos_] != ',' &&
                            content_[pos_] != '\n' && content_[pos_] != '\r') {
                            fail("closing quote not followed by delimiter");
                        }
                    }
                } else {
                    field.push_back(c);
                    ++pos_;
                }
                continue;
            }
            if (c == '"') {
                if (!at_field_start) fail("quote inside unquoted field");
                quoted = true;
                at_field_start = false;
                ++pos_;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
                at_field_start = true;
                ++pos_;
            } else if (c == '\n' || c == '\r') {
                ++pos_;
                if (c == '\r' && pos_ < content_.size() && content_[pos_] == '\n') ++pos_;
                fields.push_back(std::move(field));
                return true;
            } else {
                field.push_back(c);
                at_field_start = false;
                ++pos_;
            }
        }
        if (quoted) fail("unterminated quoted field");
        fields.push_back(std::move(field));
        return true;
    }

    // Record number of the record most recently returned by next().
    std::size_t record_number() const { return record_; }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("malformed CSV at record " + std::to_string(record_) + ": " + msg);
    }

    std::string content_;
    std::size_t pos_ = 0;
    std::size_t record_ = 0;
};

inline bool needs_quoting(std::string_view field) {
    if (!field.empty() && (field.front() == ' ' || field.back() == ' ')) return true;
    return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline std::string quote(std::string_view field) {
    if (!needs_quoting(field)) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (const char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string join_record(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += quote(fields[i]);
    }
    out.push_back('\n');
    return out;
}

}  // namespace bertdetect::csv
