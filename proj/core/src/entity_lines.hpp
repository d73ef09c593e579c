#pragma once

// Line-level parsing of standoff entity lines shared by gold and predicted annotations.

#include "evoting/error.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace evoting::detail {

struct EntityLine {
    std::size_t line_no = 0;
    std::string_view raw;
    std::string_view label;
    std::size_t start = 0;
    std::size_t end = 0;
    std::string_view surface;
};

/// Splits `T<id>\t<Label> <start> <end>\t<surface>` lines; other lines are skipped.
/// Throws MalformedLine on grammar violations.
std::vector<EntityLine> split_entity_lines(std::string_view blob, std::string_view doc_id);

/// Bounds and surface check against decoded text. Newlines in the slice compare equal to spaces.
void check_entity_against_text(const EntityLine &line, std::u32string_view text, std::string_view doc_id);

}  // namespace evoting::detail
