#include "evoting/calibration.hpp"

#include "evoting/text.hpp"
#include "records.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace evoting {

std::size_t CalibrationReport::token_count() const noexcept {
    std::size_t n = 0;
    for (const auto &b : bins) {
        n += b.count;
    }
    return n;
}

double CalibrationReport::ece_from_bins() const noexcept {
    const auto n = static_cast<double>(token_count());
    if (n == 0.0) {
        return 0.0;
    }
    double ece = 0.0;
    for (const auto &b : bins) {
        if (b.count > 0) {
            ece += (static_cast<double>(b.count) / n) * std::abs(b.accuracy - b.mean_confidence);
        }
    }
    return ece;
}

std::size_t confidence_bin(double confidence, std::size_t num_bins) noexcept {
    const auto n = static_cast<double>(num_bins);
    // Start from the arithmetic guess and correct against the exact boundary doubles.
    auto guess = static_cast<std::ptrdiff_t>(std::ceil(confidence * n)) - 1;
    auto b = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(guess, 0, static_cast<std::ptrdiff_t>(num_bins) - 1));
    while (b > 0 && confidence <= static_cast<double>(b) / n) {
        --b;
    }
    while (b + 1 < num_bins && confidence > static_cast<double>(b + 1) / n) {
        ++b;
    }
    return b;
}

CalibrationReport compute_ece(const PredictionSet &pred, const TokenizedCorpus &gold, std::size_t num_bins) {
    if (num_bins == 0) {
        throw Error(ErrorCode::ConfigError, "num_bins must be positive");
    }
    const auto violations = validate_alignment(pred, gold);
    if (!violations.empty()) {
        const auto &v = violations.front();
        throw Error(ErrorCode::AlignmentError, "model '" + pred.model_id + "': " + std::string(to_string(v.kind)) +
                                                   " in " + v.doc_id + " (" + v.detail + "), " +
                                                   std::to_string(violations.size()) + " violation(s) total");
    }

    std::vector<double> confidence_sum(num_bins, 0.0);
    std::vector<std::size_t> correct(num_bins, 0);
    std::vector<std::size_t> count(num_bins, 0);
    std::size_t total = 0;
    for (const auto &doc : gold) {
        if (doc.tokens.empty()) {
            continue;
        }
        if (!doc.has_gold) {
            throw Error(ErrorCode::AlignmentError, "document '" + doc.doc_id + "' has no gold tags");
        }
        const auto &rows = pred.docs.at(doc.doc_id);
        for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
            const auto &p = rows[i].p;
            const auto best = argmax(p);
            const double confidence = p[best];
            const auto b = confidence_bin(confidence, num_bins);
            confidence_sum[b] += confidence;
            correct[b] += kTags[best] == doc.tags[i] ? 1 : 0;
            ++count[b];
            ++total;
        }
    }
    if (total == 0) {
        throw Error(ErrorCode::EmptyInput, "model '" + pred.model_id + "': no tokens to calibrate");
    }

    CalibrationReport report;
    report.model_id = pred.model_id;
    report.bins.reserve(num_bins);
    const auto n = static_cast<double>(num_bins);
    for (std::size_t b = 0; b < num_bins; ++b) {
        CalibrationBin bin;
        bin.lower = static_cast<double>(b) / n;
        bin.upper = static_cast<double>(b + 1) / n;
        bin.count = count[b];
        if (count[b] > 0) {
            bin.mean_confidence = confidence_sum[b] / static_cast<double>(count[b]);
            bin.accuracy = static_cast<double>(correct[b]) / static_cast<double>(count[b]);
        }
        report.bins.push_back(bin);
    }
    report.ece = report.ece_from_bins();
    return report;
}

WeightRule inverse_ece_rule(double epsilon) {
    return [epsilon](double ece) { return 1.0 / (ece + epsilon); };
}

WeightRule complement_ece_rule(double epsilon) {
    return [epsilon](double ece) { return (1.0 - ece) + epsilon; };
}

WeightVector ece_weights(std::span<const CalibrationReport> reports, const WeightRule &rule) {
    if (reports.empty()) {
        throw Error(ErrorCode::EmptyInput, "no calibration reports to derive weights from");
    }
    WeightVector weights;
    weights.reserve(reports.size());
    double total = 0.0;
    for (const auto &r : reports) {
        const double score = rule(r.ece);
        if (!std::isfinite(score) || score <= 0.0) {
            throw Error(ErrorCode::ConfigError, "weight rule produced a non-positive score for '" + r.model_id + "'");
        }
        weights.push_back({r.model_id, score});
        total += score;
    }
    for (auto &w : weights) {
        w.weight /= total;
    }
    return weights;
}

WeightVector ece_weights(std::span<const CalibrationReport> reports, double epsilon) {
    return ece_weights(reports, inverse_ece_rule(epsilon));
}

std::string serialize_calibration(std::span<const CalibrationReport> reports) {
    std::string out;
    for (const auto &r : reports) {
        detail::json bins = detail::json::array();
        for (const auto &b : r.bins) {
            bins.push_back({{"lower", b.lower},
                            {"upper", b.upper},
                            {"count", b.count},
                            {"mean_confidence", b.mean_confidence},
                            {"accuracy", b.accuracy}});
        }
        out += detail::to_line(detail::json{{"kind", "calibration"},
                                            {"model_id", r.model_id},
                                            {"ece", r.ece},
                                            {"num_bins", r.bins.size()},
                                            {"tokens", r.token_count()},
                                            {"bins", std::move(bins)}});
    }
    return out;
}

std::vector<CalibrationReport> parse_calibration(std::string_view records, std::string_view source) {
    std::vector<CalibrationReport> reports;
    for (const auto &r : detail::parse_records(records, source)) {
        CalibrationReport report;
        report.model_id = detail::require<std::string>(r, "model_id", source);
        report.ece = detail::require<double>(r, "ece", source);
        if (!(report.ece >= 0.0 && report.ece <= 1.0)) {
            detail::schema_error(r, source, "ece must lie in [0, 1]");
        }
        const auto bins = r.value.find("bins");
        if (bins != r.value.end()) {
            if (!bins->is_array()) {
                detail::schema_error(r, source, "field 'bins' must be an array");
            }
            try {
                for (const auto &b : *bins) {
                    report.bins.push_back(CalibrationBin{b.at("lower").get<double>(), b.at("upper").get<double>(),
                                                         b.at("count").get<std::size_t>(),
                                                         b.at("mean_confidence").get<double>(),
                                                         b.at("accuracy").get<double>()});
                }
            } catch (const nlohmann::json::exception &e) {
                detail::schema_error(r, source, std::string("malformed bin: ") + e.what());
            }
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

std::vector<CalibrationReport> load_calibration(const std::filesystem::path &path) {
    return parse_calibration(read_file(path), path.string());
}

}  // namespace evoting
