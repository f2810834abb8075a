#include "rowexit/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rowexit/error.hpp"

namespace rowexit {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

template <typename T>
T parse_field(const std::string& text, int line, std::string_view column) {
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        fail(ErrorCode::SchemaError,
             "line " + std::to_string(line) + ": bad " + std::string(column) + " '" + text + "'");
    }
    return v;
}

std::optional<double> parse_error(const std::string& text, int line, std::string_view column) {
    if (text.empty()) return std::nullopt;
    const double v = parse_field<double>(text, line, column);
    if (!std::isfinite(v)) fail(ErrorCode::SchemaError, "line " + std::to_string(line) + ": non-finite error");
    return v;
}

nlohmann::ordered_json error_json(const ErrorStats& s) {
    nlohmann::ordered_json j;
    j["count"] = s.count;
    j["median_abs_error_m"] = s.median_abs_error ? nlohmann::ordered_json(*s.median_abs_error) : nullptr;
    j["positive_error_fraction"] =
        s.positive_error_fraction ? nlohmann::ordered_json(*s.positive_error_fraction) : nullptr;
    return j;
}

nlohmann::ordered_json regime_json(const RegimeStats& r) {
    nlohmann::ordered_json j;
    j["trials"] = r.trials;
    j["aborted"] = r.aborted;
    j["stage1"] = error_json(r.stage1);
    j["stage2"] = error_json(r.stage2);
    return j;
}

RegimeStats summarize_rows(const std::vector<const TrialRow*>& rows) {
    RegimeStats r;
    std::vector<double> e1, e2;
    for (const TrialRow* row : rows) {
        ++r.trials;
        if (!row->abort.empty()) ++r.aborted;
        if (row->stage1_error) e1.push_back(*row->stage1_error);
        if (row->stage2_error) e2.push_back(*row->stage2_error);
    }
    r.stage1 = summarize_errors(e1);
    r.stage2 = summarize_errors(e2);
    return r;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_trials_csv(std::ostream& out, std::span<const TrialRow> rows) {
    out << kTrialCsvHeader << '\n';
    for (const TrialRow& r : rows) {
        out << r.seed << ',' << r.regime << ',' << (r.stage1_error ? format_double(*r.stage1_error) : "") << ','
            << (r.stage2_error ? format_double(*r.stage2_error) : "") << ',' << r.abort << ',' << r.frames << '\n';
    }
}

std::vector<TrialRow> read_trials_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.find_first_not_of(" \t\r") == std::string::npos) {
        fail(ErrorCode::EmptyInput, "trial CSV is empty");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrialCsvHeader) {
        fail(ErrorCode::SchemaError, "unexpected header '" + line + "', want '" + std::string(kTrialCsvHeader) + "'");
    }
    std::vector<TrialRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6) {
            fail(ErrorCode::SchemaError,
                 "line " + std::to_string(lineno) + ": expected 6 fields, got " + std::to_string(f.size()));
        }
        TrialRow r;
        r.seed = parse_field<std::uint64_t>(f[0], lineno, "seed");
        r.regime = f[1];
        if (r.regime.empty()) fail(ErrorCode::SchemaError, "line " + std::to_string(lineno) + ": empty regime");
        r.stage1_error = parse_error(f[2], lineno, "stage1_error_m");
        r.stage2_error = parse_error(f[3], lineno, "stage2_error_m");
        r.abort = f[4];
        r.frames = parse_field<int>(f[5], lineno, "frames");
        rows.push_back(std::move(r));
    }
    if (rows.empty()) fail(ErrorCode::EmptyInput, "trial CSV has no data rows");
    return rows;
}

double median(std::vector<double> values) {
    if (values.empty()) fail(ErrorCode::EmptyInput, "median of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ErrorStats summarize_errors(std::span<const double> errors) {
    ErrorStats s;
    s.count = errors.size();
    if (errors.empty()) return s;
    std::vector<double> abs_err;
    abs_err.reserve(errors.size());
    std::size_t positive = 0;
    for (double e : errors) {
        abs_err.push_back(std::abs(e));
        if (e > 0) ++positive;
    }
    s.median_abs_error = median(std::move(abs_err));
    s.positive_error_fraction = static_cast<double>(positive) / static_cast<double>(errors.size());
    return s;
}

AggregateStats aggregate(std::span<const TrialRow> rows) {
    if (rows.empty()) fail(ErrorCode::EmptyInput, "no trials to aggregate");
    std::vector<const TrialRow*> all;
    std::map<std::string, std::vector<const TrialRow*>> by_regime;
    for (const TrialRow& r : rows) {
        all.push_back(&r);
        by_regime[r.regime].push_back(&r);
    }
    AggregateStats out;
    out.overall = summarize_rows(all);
    for (const auto& [name, group] : by_regime) out.per_regime[name] = summarize_rows(group);
    return out;
}

std::string to_json(const AggregateStats& stats) {
    nlohmann::ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["trial_count"] = stats.overall.trials;
    j["overall"] = regime_json(stats.overall);
    nlohmann::ordered_json regimes = nlohmann::ordered_json::object();
    for (const auto& [name, r] : stats.per_regime) regimes[name] = regime_json(r);
    j["per_regime"] = std::move(regimes);
    return j.dump(2) + "\n";
}

std::string to_summary(const AggregateStats& stats) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(1);
    auto line = [&](const std::string& name, const RegimeStats& r) {
        out << name << ": " << r.trials << " trials, " << r.aborted << " aborted\n";
        const std::pair<const char*, const ErrorStats*> stages[] = {{"stage 1", &r.stage1}, {"stage 2", &r.stage2}};
        for (const auto& [label, s] : stages) {
            out << "  " << label << ": ";
            if (!s->median_abs_error) {
                out << "no errors available\n";
                continue;
            }
            out << "median |error| " << *s->median_abs_error * 100.0 << " cm, " << *s->positive_error_fraction * 100.0
                << "% positive (n=" << s->count << ")\n";
        }
    };
    line("all", stats.overall);
    for (const auto& [name, r] : stats.per_regime) line(name, r);
    return out.str();
}

}  // namespace rowexit
