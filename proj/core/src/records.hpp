#pragma once

// Shared helpers for the line-delimited JSON record files. Private to the core library.

#include "evoting/error.hpp"

#include <json.hpp>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace evoting::detail {

using json = nlohmann::json;

struct Record {
    std::size_t line_no = 0;
    json value;
};

/// One JSON object per non-blank line. Throws SchemaError naming the line on bad syntax.
inline std::vector<Record> parse_records(std::string_view text, std::string_view what) {
    std::vector<Record> records;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        const auto line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }
        auto value = json::parse(line.begin(), line.end(), nullptr, false);
        if (value.is_discarded() || !value.is_object()) {
            throw Error(ErrorCode::SchemaError, std::string(what) + " line " + std::to_string(line_no) +
                                                    ": not a JSON object");
        }
        records.push_back(Record{line_no, std::move(value)});
    }
    return records;
}

[[noreturn]] inline void schema_error(const Record &r, std::string_view what, const std::string &msg) {
    throw Error(ErrorCode::SchemaError, std::string(what) + " line " + std::to_string(r.line_no) + ": " + msg);
}

template <typename T>
T require(const Record &r, const char *field, std::string_view what) {
    const auto it = r.value.find(field);
    if (it == r.value.end()) {
        schema_error(r, what, std::string("missing field '") + field + "'");
    }
    try {
        if constexpr (std::is_same_v<T, std::size_t>) {
            if (!it->is_number_unsigned()) {
                schema_error(r, what, std::string("field '") + field + "' must be a non-negative integer");
            }
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!it->is_string()) {
                schema_error(r, what, std::string("field '") + field + "' must be a string");
            }
        } else if constexpr (std::is_same_v<T, double>) {
            if (!it->is_number()) {
                schema_error(r, what, std::string("field '") + field + "' must be a number");
            }
        }
        return it->get<T>();
    } catch (const nlohmann::json::exception &e) {
        schema_error(r, what, std::string("field '") + field + "': " + e.what());
    }
}

/// Full-precision round-trippable JSON line.
inline std::string to_line(const json &value) { return value.dump() + "\n"; }

}  // namespace evoting::detail
