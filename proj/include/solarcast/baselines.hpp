#pragma once

#include "solarcast/clear_sky.hpp"
#include "solarcast/error.hpp"
#include "solarcast/tes.hpp"

#include <cstddef>
#include <vector>

namespace solarcast {

namespace detail {

inline Forecast flat_forecast(std::size_t origin, double value, std::size_t m_max) {
    require(m_max >= 1, "forecast horizon must be at least one step");
    Forecast out;
    out.origin = origin;
    for (std::size_t m = 1; m <= m_max; ++m) out.horizon.push_back({m, value, value});
    return out;
}

} // namespace detail

/// Last valid clearness index, repeated for every horizon.
inline Forecast persistence_forecast(const ClearnessSeries& history, std::size_t m_max) {
    for (std::size_t i = history.size(); i-- > 0;) {
        if (history.is_valid(i)) return detail::flat_forecast(history.size() - 1, history.k_at(i), m_max);
    }
    throw Error(ErrorKind::insufficient_data, "persistence needs at least one valid sample");
}

/// Mean of the valid clearness indices among the trailing `window` samples.
inline Forecast average_forecast(const ClearnessSeries& history, std::size_t window, std::size_t m_max) {
    detail::require(window >= 1, "average window must be at least one sample");
    const std::size_t first = history.size() > window ? history.size() - window : 0;
    std::vector<double> values;
    for (std::size_t i = first; i < history.size(); ++i) {
        if (history.is_valid(i)) values.push_back(history.k_at(i));
    }
    if (values.empty()) throw Error(ErrorKind::insufficient_data, "no valid samples in the trailing average window");
    return detail::flat_forecast(history.size() - 1, detail::shifted_mean(values), m_max);
}

} // namespace solarcast
