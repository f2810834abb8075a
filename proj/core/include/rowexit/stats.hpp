#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rowexit {

/// One row of the trial CSV: seed,regime,stage1_error_m,stage2_error_m,abort,frames.
/// Missing errors and an absent abort are empty fields.
struct TrialRow {
    std::uint64_t seed = 0;
    std::string regime;
    std::optional<double> stage1_error;
    std::optional<double> stage2_error;
    std::string abort;
    int frames = 0;

    friend bool operator==(const TrialRow&, const TrialRow&) = default;
};

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kTrialCsvHeader = "seed,regime,stage1_error_m,stage2_error_m,abort,frames";

void write_trials_csv(std::ostream& out, std::span<const TrialRow> rows);
/// Throws EmptyInput for a file without data rows, SchemaError for anything malformed.
std::vector<TrialRow> read_trials_csv(std::istream& in);

/// Summary of one error sample. With no samples, both statistics are absent.
struct ErrorStats {
    std::size_t count = 0;
    std::optional<double> median_abs_error;         // metres
    std::optional<double> positive_error_fraction;  // count(error > 0) / count

    friend bool operator==(const ErrorStats&, const ErrorStats&) = default;
};

ErrorStats summarize_errors(std::span<const double> errors);

/// Median with the even-count rule (mean of the two middle values). Throws EmptyInput.
double median(std::vector<double> values);

struct RegimeStats {
    std::size_t trials = 0;
    std::size_t aborted = 0;
    ErrorStats stage1;
    ErrorStats stage2;

    friend bool operator==(const RegimeStats&, const RegimeStats&) = default;
};

struct AggregateStats {
    RegimeStats overall;
    std::map<std::string, RegimeStats> per_regime;

    friend bool operator==(const AggregateStats&, const AggregateStats&) = default;
};

/// Throws EmptyInput when `rows` is empty.
AggregateStats aggregate(std::span<const TrialRow> rows);

/// Pretty-printed JSON report, keys in a fixed order, trailing newline.
std::string to_json(const AggregateStats& stats);

/// Human-readable summary with errors in centimetres.
std::string to_summary(const AggregateStats& stats);

/// Shortest decimal text that reads back as the same double.
std::string format_double(double v);

}  // namespace rowexit
