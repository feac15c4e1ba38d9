#pragma once

#include "solarcast/error.hpp"
#include "solarcast/format.hpp"
#include "solarcast/time.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace solarcast {

/// Uniformly sampled global horizontal irradiance (W/m²) with a validity mask.
///
/// Values at invalid positions are stored as 0 so that two series holding
/// the same valid samples compare equal bit for bit.
class IrradianceSeries {
public:
    IrradianceSeries(Timestamp start, std::int64_t step_seconds, std::vector<double> values, std::vector<bool> valid)
        : start_(start), step_(step_seconds), values_(std::move(values)), valid_(std::move(valid)) {
        detail::require(step_ > 0, "series step must be positive");
        detail::require(values_.size() == valid_.size(), "values and mask lengths differ");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!valid_[i]) {
                values_[i] = 0.0;
                continue;
            }
            detail::require(std::isfinite(values_[i]) && values_[i] >= 0.0,
                            "valid irradiance must be finite and non-negative (index " + std::to_string(i) + ")");
        }
    }

    /// All samples valid.
    IrradianceSeries(Timestamp start, std::int64_t step_seconds, std::vector<double> values)
        : IrradianceSeries(start, step_seconds, values, std::vector<bool>(values.size(), true)) {}

    Timestamp start() const noexcept { return start_; }
    std::int64_t step() const noexcept { return step_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<bool>& valid() const noexcept { return valid_; }
    double value(std::size_t i) const { return values_.at(i); }
    bool is_valid(std::size_t i) const { return valid_.at(i); }
    Timestamp time_at(std::size_t i) const noexcept { return start_ + static_cast<std::int64_t>(i) * step_; }
    /// One past the last sample instant.
    Timestamp end() const noexcept { return time_at(size()); }

    std::size_t valid_count() const noexcept {
        std::size_t n = 0;
        for (bool v : valid_) n += v;
        return n;
    }

    /// Samples [first, first + count).
    IrradianceSeries slice(std::size_t first, std::size_t count) const {
        detail::require(first + count <= size(), "slice out of range");
        return IrradianceSeries(time_at(first), step_,
                                std::vector<double>(values_.begin() + first, values_.begin() + first + count),
                                std::vector<bool>(valid_.begin() + first, valid_.begin() + first + count));
    }

    friend bool operator==(const IrradianceSeries&, const IrradianceSeries&) = default;

private:
    Timestamp start_;
    std::int64_t step_;
    std::vector<double> values_;
    std::vector<bool> valid_;
};

namespace detail {

inline std::string_view trim_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

inline bool is_missing_field(std::string_view field) {
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    if (field.empty()) return true;
    if (field.size() != 3) return false;
    auto lower = [](char c) { return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c); };
    return lower(field[0]) == 'n' && lower(field[1]) == 'a' && lower(field[2]) == 'n';
}

} // namespace detail

inline constexpr std::string_view kSeriesCsvHeader = "timestamp_utc,ghi_wm2";

/// Reads `timestamp_utc,ghi_wm2` CSV. Lines starting with '#' are metadata
/// and skipped. The native step is the smallest timestamp difference; holes
/// in the grid become invalid samples.
inline IrradianceSeries parse_csv(std::istream& in) {
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<std::pair<Timestamp, std::optional<double>>> rows;
    std::vector<std::size_t> row_lines;

    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = detail::trim_line(raw);
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != kSeriesCsvHeader)
                throw Error(ErrorKind::parse, "expected header '" + std::string(kSeriesCsvHeader) + "'", line_no);
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
            throw Error(ErrorKind::parse, "expected exactly two fields", line_no);
        Timestamp ts;
        try {
            ts = Timestamp::parse_iso8601(line.substr(0, comma));
        } catch (const Error& e) {
            throw Error(ErrorKind::parse, e.what(), line_no);
        }
        const auto field = line.substr(comma + 1);
        std::optional<double> value;
        if (!detail::is_missing_field(field)) {
            value = parse_double(field);
            if (!value || !std::isfinite(*value))
                throw Error(ErrorKind::parse, "malformed irradiance value '" + std::string(field) + "'", line_no);
            if (*value < 0.0)
                throw Error(ErrorKind::validation, "negative irradiance " + std::string(field), line_no);
        }
        if (!rows.empty() && !(rows.back().first < ts))
            throw Error(ErrorKind::ordering, "timestamps must be strictly increasing", line_no);
        rows.emplace_back(ts, value);
        row_lines.push_back(line_no);
    }
    if (!header_seen) throw Error(ErrorKind::parse, "missing header '" + std::string(kSeriesCsvHeader) + "'");
    if (rows.size() < 2) throw Error(ErrorKind::insufficient_data, "at least two data rows are required");

    std::int64_t step = rows[1].first - rows[0].first;
    for (std::size_t i = 2; i < rows.size(); ++i) step = std::min(step, rows[i].first - rows[i - 1].first);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if ((rows[i].first - rows[0].first) % step != 0)
            throw Error(ErrorKind::alignment, "timestamp off the " + std::to_string(step) + " s grid", row_lines[i]);
    }

    const auto n = static_cast<std::size_t>((rows.back().first - rows.front().first) / step) + 1;
    std::vector<double> values(n, 0.0);
    std::vector<bool> valid(n, false);
    for (const auto& [ts, value] : rows) {
        const auto idx = static_cast<std::size_t>((ts - rows.front().first) / step);
        if (value) {
            values[idx] = *value;
            valid[idx] = true;
        }
    }
    return IrradianceSeries(rows.front().first, step, std::move(values), std::move(valid));
}

inline IrradianceSeries parse_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

/// Writes the series in the same schema `parse_csv` reads. Invalid samples
/// get an empty value field. Each metadata pair becomes a leading
/// `# key=value` line.
inline void write_csv(std::ostream& out, const IrradianceSeries& series,
                      const std::vector<std::pair<std::string, std::string>>& metadata = {}) {
    for (const auto& [key, value] : metadata) out << "# " << key << '=' << value << '\n';
    out << kSeriesCsvHeader << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series.time_at(i).iso8601() << ',';
        if (series.is_valid(i)) out << format_double(series.value(i));
        out << '\n';
    }
}

inline std::string write_csv(const IrradianceSeries& series) {
    std::ostringstream out;
    write_csv(out, series);
    return out.str();
}

/// Window-mean downsampling to `target_step`. Each output sample averages the
/// valid inputs in [t, t + target_step); it is invalid only when every input
/// in the window is. A trailing partial window is kept.
inline IrradianceSeries resample(const IrradianceSeries& series, std::int64_t target_step) {
    if (target_step < series.step())
        throw Error(ErrorKind::unsupported, "upsampling from " + std::to_string(series.step()) + " s to " +
                                                std::to_string(target_step) + " s is not supported");
    if (target_step % series.step() != 0)
        throw Error(ErrorKind::alignment, "target step " + std::to_string(target_step) +
                                              " s is not a multiple of " + std::to_string(series.step()) + " s");
    const auto ratio = static_cast<std::size_t>(target_step / series.step());
    const std::size_t n_out = (series.size() + ratio - 1) / ratio;
    std::vector<double> values(n_out, 0.0);
    std::vector<bool> valid(n_out, false);
    for (std::size_t w = 0; w < n_out; ++w) {
        double sum = 0.0;
        std::size_t count = 0;
        const std::size_t last = std::min(series.size(), (w + 1) * ratio);
        for (std::size_t i = w * ratio; i < last; ++i) {
            if (!series.is_valid(i)) continue;
            sum += series.value(i);
            ++count;
        }
        if (count > 0) {
            values[w] = sum / static_cast<double>(count);
            valid[w] = true;
        }
    }
    return IrradianceSeries(series.start(), target_step, std::move(values), std::move(valid));
}

} // namespace solarcast
