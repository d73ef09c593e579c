#include "evoting/error.hpp"
#include "evoting/labels.hpp"

namespace evoting {

namespace {

constexpr std::array<std::string_view, kEventClassCount> kEventClassNames{"Disposition", "NoDisposition",
                                                                          "Undetermined"};
constexpr std::array<std::string_view, kTagCount> kTagNames{
    "O", "B-Disposition", "I-Disposition", "B-NoDisposition", "I-NoDisposition", "B-Undetermined", "I-Undetermined"};
constexpr std::array<std::string_view, kSpanLabelCount> kSpanLabelNames{"Disposition", "NoDisposition",
                                                                        "Undetermined", "Drug"};

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MalformedLine: return "MalformedLine";
        case ErrorCode::OffsetOutOfRange: return "OffsetOutOfRange";
        case ErrorCode::SurfaceMismatch: return "SurfaceMismatch";
        case ErrorCode::UnknownLabel: return "UnknownLabel";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::ProbabilityError: return "ProbabilityError";
        case ErrorCode::DuplicateRow: return "DuplicateRow";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::AlignmentError: return "AlignmentError";
        case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
        case ErrorCode::WeightMismatch: return "WeightMismatch";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::UnsortedInput: return "UnsortedInput";
        case ErrorCode::UnknownDocument: return "UnknownDocument";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

std::string_view to_string(ViolationKind kind) noexcept {
    switch (kind) {
        case ViolationKind::DuplicateId: return "DuplicateId";
        case ViolationKind::OverlapViolation: return "OverlapViolation";
        case ViolationKind::SurfaceMismatch: return "SurfaceMismatch";
        case ViolationKind::MissingRow: return "MissingRow";
        case ViolationKind::UnknownDocument: return "UnknownDocument";
        case ViolationKind::UnknownToken: return "UnknownToken";
        case ViolationKind::OffsetMismatch: return "OffsetMismatch";
    }
    return "UnknownViolation";
}

std::string_view to_string(EventClass c) noexcept { return kEventClassNames[static_cast<std::size_t>(c)]; }

std::optional<EventClass> parse_event_class(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kEventClassCount; ++i) {
        if (kEventClassNames[i] == name) {
            return kEventClasses[i];
        }
    }
    return std::nullopt;
}

std::string_view to_string(BioTag tag) noexcept { return kTagNames[tag_index(tag)]; }

std::optional<BioTag> parse_bio_tag(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kTagCount; ++i) {
        if (kTagNames[i] == name) {
            return kTags[i];
        }
    }
    return std::nullopt;
}

std::string_view to_string(SpanLabel label) noexcept { return kSpanLabelNames[static_cast<std::size_t>(label)]; }

std::optional<SpanLabel> parse_span_label(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kSpanLabelCount; ++i) {
        if (kSpanLabelNames[i] == name) {
            return static_cast<SpanLabel>(i);
        }
    }
    return std::nullopt;
}

}  // namespace evoting
