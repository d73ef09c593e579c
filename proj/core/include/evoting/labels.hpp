#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace evoting {

// Canonical order Disposition < NoDisposition < Undetermined is used for every tie-break.
enum class EventClass : std::uint8_t { Disposition = 0, NoDisposition = 1, Undetermined = 2 };

inline constexpr std::size_t kEventClassCount = 3;
inline constexpr std::array<EventClass, kEventClassCount> kEventClasses{
    EventClass::Disposition, EventClass::NoDisposition, EventClass::Undetermined};

std::string_view to_string(EventClass c) noexcept;
/// Case-sensitive lookup; nullopt for anything outside the closed set.
std::optional<EventClass> parse_event_class(std::string_view name) noexcept;

// Index order is the canonical tag order embedded in prediction files.
enum class BioTag : std::uint8_t {
    O = 0,
    BDisposition = 1,
    IDisposition = 2,
    BNoDisposition = 3,
    INoDisposition = 4,
    BUndetermined = 5,
    IUndetermined = 6,
};

inline constexpr std::size_t kTagCount = 7;
inline constexpr std::array<BioTag, kTagCount> kTags{
    BioTag::O,           BioTag::BDisposition,   BioTag::IDisposition,  BioTag::BNoDisposition,
    BioTag::INoDisposition, BioTag::BUndetermined, BioTag::IUndetermined};

std::string_view to_string(BioTag tag) noexcept;
std::optional<BioTag> parse_bio_tag(std::string_view name) noexcept;

constexpr std::size_t tag_index(BioTag tag) noexcept { return static_cast<std::size_t>(tag); }

constexpr BioTag begin_tag(EventClass c) noexcept {
    return static_cast<BioTag>(1 + 2 * static_cast<std::uint8_t>(c));
}
constexpr BioTag inside_tag(EventClass c) noexcept {
    return static_cast<BioTag>(2 + 2 * static_cast<std::uint8_t>(c));
}
constexpr bool is_begin(BioTag tag) noexcept { return tag != BioTag::O && tag_index(tag) % 2 == 1; }
constexpr bool is_inside(BioTag tag) noexcept { return tag != BioTag::O && tag_index(tag) % 2 == 0; }

/// Event class of a B-/I- tag. Precondition: tag != O.
constexpr EventClass event_class_of(BioTag tag) noexcept {
    return static_cast<EventClass>((tag_index(tag) - 1) / 2);
}

// Labels carried by decoded spans: the three event classes plus the binary medication label.
enum class SpanLabel : std::uint8_t { Disposition = 0, NoDisposition = 1, Undetermined = 2, Drug = 3 };

inline constexpr std::size_t kSpanLabelCount = 4;

constexpr SpanLabel to_span_label(EventClass c) noexcept { return static_cast<SpanLabel>(c); }

std::string_view to_string(SpanLabel label) noexcept;
std::optional<SpanLabel> parse_span_label(std::string_view name) noexcept;

}  // namespace evoting
