#pragma once

#include "solarcast/clear_sky.hpp"
#include "solarcast/error.hpp"
#include "solarcast/format.hpp"
#include "solarcast/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace solarcast {

/// How the L seasonal indices are seeded from the history cycles.
///  - additive:    c_i = mean_j (k_{L(j-1)+i} - A_j)
///  - paper_ratio: c_i = mean_j (k_{L(j-1)+i} / A_j)
/// The ratio form is the classic multiplicative seeding; fed into the
/// additive recursion it biases every forecast by roughly +1.
enum class SeasonalInit { additive, paper_ratio };

inline constexpr std::string_view to_string(SeasonalInit mode) noexcept {
    return mode == SeasonalInit::additive ? "additive" : "paper-ratio";
}

inline SeasonalInit parse_seasonal_init(std::string_view text) {
    if (text == "additive") return SeasonalInit::additive;
    if (text == "paper-ratio" || text == "paper_ratio") return SeasonalInit::paper_ratio;
    throw Error(ErrorKind::validation, "unknown seasonal init mode '" + std::string(text) + "'");
}

class TesParams {
public:
    TesParams(double alpha, double beta, double gamma, std::size_t season_length,
              SeasonalInit seasonal_init = SeasonalInit::additive)
        : alpha_(alpha), beta_(beta), gamma_(gamma), season_length_(season_length), seasonal_init_(seasonal_init) {
        auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
        detail::require(open_unit(alpha_), "alpha must be within (0, 1)");
        detail::require(open_unit(beta_), "beta must be within (0, 1)");
        detail::require(open_unit(gamma_), "gamma must be within (0, 1)");
        detail::require(season_length_ >= 2, "season length must be at least 2");
    }

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double gamma() const noexcept { return gamma_; }
    std::size_t season_length() const noexcept { return season_length_; }
    SeasonalInit seasonal_init() const noexcept { return seasonal_init_; }

    friend bool operator==(const TesParams&, const TesParams&) = default;

private:
    double alpha_;
    double beta_;
    double gamma_;
    std::size_t season_length_;
    SeasonalInit seasonal_init_;
};

/// Level, trend and seasonal ring after consuming `t` samples. Seasonal slot
/// `i mod L` holds the latest index for phase i, counting from the first
/// history sample.
struct TesState {
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> seasonal;
    std::size_t t = 0;

    std::size_t season_length() const noexcept { return seasonal.size(); }
    friend bool operator==(const TesState&, const TesState&) = default;
};

struct ForecastPoint {
    std::size_t m = 0;   ///< steps ahead, ≥ 1
    double k_hat = 0.0;  ///< clamped to [0, 1.5]
    double raw = 0.0;    ///< unclamped s + m·b + c

    friend bool operator==(const ForecastPoint&, const ForecastPoint&) = default;
};

struct Forecast {
    std::size_t origin = 0;  ///< sample index of the last observation
    std::vector<ForecastPoint> horizon;

    std::vector<double> values() const {
        std::vector<double> out;
        out.reserve(horizon.size());
        for (const auto& p : horizon) out.push_back(p.k_hat);
        return out;
    }
};

namespace detail {

inline double clamp_clearness(double k) noexcept { return std::clamp(k, 0.0, kMaxClearness); }

/// Mean taken relative to the first element, so a constant range returns
/// that constant exactly.
inline double shifted_mean(std::span<const double> xs) noexcept {
    double sum = 0.0;
    for (double x : xs) sum += x - xs.front();
    return xs.front() + sum / static_cast<double>(xs.size());
}

/// s0 = k0, b0 from the first two cycles, seasonal indices from all complete
/// cycles. The result has consumed k0 only (t = 1).
inline TesState seed_state(std::span<const double> k, std::size_t L, SeasonalInit mode) {
    if (k.size() < 2 * L)
        throw Error(ErrorKind::insufficient_data, "TES needs at least 2L = " + std::to_string(2 * L) +
                                                      " history samples, got " + std::to_string(k.size()));
    const std::size_t cycles = k.size() / L;
    const double Ld = static_cast<double>(L);

    TesState state;
    state.level = k[0];
    double trend = 0.0;
    for (std::size_t i = 0; i < L; ++i) trend += (k[L + i] - k[i]) / Ld;
    state.trend = trend / Ld;

    std::vector<double> cycle_mean(cycles, 0.0);
    for (std::size_t j = 0; j < cycles; ++j) {
        cycle_mean[j] = shifted_mean(k.subspan(j * L, L));
        if (mode == SeasonalInit::paper_ratio && cycle_mean[j] == 0.0)
            throw Error(ErrorKind::degenerate_cycle, "cycle " + std::to_string(j) + " averages to zero");
    }
    state.seasonal.assign(L, 0.0);
    for (std::size_t i = 0; i < L; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < cycles; ++j)
            sum += mode == SeasonalInit::additive ? k[j * L + i] - cycle_mean[j] : k[j * L + i] / cycle_mean[j];
        state.seasonal[i] = sum / static_cast<double>(cycles);
    }
    state.t = 1;
    return state;
}

/// One step of the additive Holt-Winters recursion, in place, written in
/// error-correction form: s = p + α(k − c − p), b += β(s − s_prev − b),
/// c += γ(k − p − c) with p = s_prev + b_prev. Algebraically identical to
/// the textbook weighted-average form; constant input stays an exact fixed
/// point. A masked observation is replaced by the one-step prediction,
/// which reduces to s ← s + b with the trend and seasonal slot untouched.
inline void advance(double& level, double& trend, double& slot, double k, bool valid, double alpha, double beta,
                    double gamma) noexcept {
    const double projected = level + trend;
    if (!valid) {
        level = projected;
        return;
    }
    const double new_level = projected + alpha * (k - slot - projected);
    trend += beta * (new_level - level - trend);
    slot += gamma * (k - projected - slot);
    level = new_level;
}

inline std::vector<std::uint8_t> mask_bytes(const std::vector<bool>& mask) {
    return std::vector<std::uint8_t>(mask.begin(), mask.end());
}

} // namespace detail

/// Seeds the state from `history` and replays the recursion over samples
/// 1..n-1 of the same history. Masked samples contribute their 1.0
/// placeholder to the seeding and are skipped by the recursion.
inline TesState initialize(const ClearnessSeries& history, const TesParams& params) {
    const std::size_t L = params.season_length();
    if (history.size() < 2 * L)
        throw Error(ErrorKind::insufficient_data, "TES needs at least 2L = " + std::to_string(2 * L) +
                                                      " history samples, got " + std::to_string(history.size()));
    if (history.valid_count() == 0)
        throw Error(ErrorKind::insufficient_data, "TES history has no valid (daytime) samples");
    TesState state = detail::seed_state(history.k(), L, params.seasonal_init());
    for (std::size_t i = 1; i < history.size(); ++i) {
        detail::advance(state.level, state.trend, state.seasonal[i % L], history.k_at(i), history.is_valid(i),
                        params.alpha(), params.beta(), params.gamma());
    }
    state.t = history.size();
    return state;
}

/// Consumes one observation; nullopt marks a masked sample.
inline TesState update(const TesState& state, std::optional<double> observation, const TesParams& params) {
    detail::require(state.seasonal.size() == params.season_length(), "state and params disagree on season length");
    if (observation) {
        if (!std::isfinite(*observation)) throw Error(ErrorKind::numeric_domain, "observation is not finite");
        detail::require(*observation >= 0.0 && *observation <= kMaxClearness,
                        "observation outside [0, 1.5]: " + format_double(*observation));
    }
    TesState next = state;
    detail::advance(next.level, next.trend, next.seasonal[next.t % next.seasonal.size()], observation.value_or(0.0),
                    observation.has_value(), params.alpha(), params.beta(), params.gamma());
    ++next.t;
    return next;
}

/// F_{t+m} = s_t + m·b_t + c_{t-L+1+(m-1) mod L} for m = 1..m_max.
inline Forecast forecast(const TesState& state, std::size_t m_max) {
    detail::require(m_max >= 1, "forecast horizon must be at least one step");
    detail::require(state.t >= 1 && !state.seasonal.empty(), "state is not initialized");
    const std::size_t L = state.seasonal.size();
    const std::size_t last = state.t - 1;
    Forecast out;
    out.origin = last;
    out.horizon.reserve(m_max);
    for (std::size_t m = 1; m <= m_max; ++m) {
        const double raw = state.level + static_cast<double>(m) * state.trend + state.seasonal[(last + m) % L];
        out.horizon.push_back({m, detail::clamp_clearness(raw), raw});
    }
    return out;
}

inline constexpr int kFitGridSteps = 19;  // 0.05, 0.10, ..., 0.95

inline double fit_grid_value(int index) noexcept { return static_cast<double>(index) / 20.0; }

/// One-step-ahead MAE of `params` on `history` after seeding from the first
/// 2L samples; only valid samples are scored.
inline double one_step_mae(const ClearnessSeries& history, const TesParams& params) {
    const std::size_t L = params.season_length();
    if (history.size() < 3 * L)
        throw Error(ErrorKind::insufficient_data, "TES fitting needs at least 3L = " + std::to_string(3 * L) +
                                                      " samples, got " + std::to_string(history.size()));
    const auto init = initialize(history.slice(0, 2 * L), params);
    double level = init.level, trend = init.trend;
    auto seasonal = init.seasonal;
    double err = 0.0;
    std::size_t scored = 0;
    for (std::size_t i = 2 * L; i < history.size(); ++i) {
        double& slot = seasonal[i % L];
        if (history.is_valid(i)) {
            err += std::abs(detail::clamp_clearness(level + trend + slot) - history.k_at(i));
            ++scored;
        }
        detail::advance(level, trend, slot, history.k_at(i), history.is_valid(i), params.alpha(), params.beta(),
                        params.gamma());
    }
    if (scored == 0) throw Error(ErrorKind::insufficient_data, "no valid samples to score after the first 2L");
    return err / static_cast<double>(scored);
}

/// Grid search over α, β, γ ∈ {0.05, ..., 0.95} minimizing one-step-ahead
/// MAE past the 2L seeding window. Ties go to the lowest α, then β, then γ.
inline TesParams fit(const ClearnessSeries& history, std::size_t season_length,
                     SeasonalInit mode = SeasonalInit::additive) {
    const std::size_t L = season_length;
    detail::require(L >= 2, "season length must be at least 2");
    if (history.size() < 3 * L)
        throw Error(ErrorKind::insufficient_data, "TES fitting needs at least 3L = " + std::to_string(3 * L) +
                                                      " samples, got " + std::to_string(history.size()));
    if (history.valid_count() == 0)
        throw Error(ErrorKind::insufficient_data, "TES history has no valid (daytime) samples");

    const auto& k = history.k();
    const auto valid = detail::mask_bytes(history.mask());
    const std::size_t n = k.size();
    const std::size_t warmup = 2 * L;
    const TesState seed = detail::seed_state(std::span<const double>(k.data(), warmup), L, mode);

    std::size_t scored = 0;
    for (std::size_t i = warmup; i < n; ++i) scored += valid[i];
    if (scored == 0) throw Error(ErrorKind::insufficient_data, "no valid samples to score after the first 2L");

    std::vector<double> seasonal(L);
    double best = 0.0;
    int best_a = 0, best_b = 0, best_g = 0;
    for (int ia = 1; ia <= kFitGridSteps; ++ia) {
        const double alpha = fit_grid_value(ia);
        for (int ib = 1; ib <= kFitGridSteps; ++ib) {
            const double beta = fit_grid_value(ib);
            for (int ig = 1; ig <= kFitGridSteps; ++ig) {
                const double gamma = fit_grid_value(ig);
                double level = seed.level, trend = seed.trend;
                std::copy(seed.seasonal.begin(), seed.seasonal.end(), seasonal.begin());
                std::size_t slot = 1;
                for (std::size_t i = 1; i < warmup; ++i) {
                    detail::advance(level, trend, seasonal[slot], k[i], valid[i], alpha, beta, gamma);
                    if (++slot == L) slot = 0;
                }
                double err = 0.0;
                for (std::size_t i = warmup; i < n; ++i) {
                    if (valid[i]) err += std::abs(detail::clamp_clearness(level + trend + seasonal[slot]) - k[i]);
                    detail::advance(level, trend, seasonal[slot], k[i], valid[i], alpha, beta, gamma);
                    if (++slot == L) slot = 0;
                }
                const double mae = err / static_cast<double>(scored);
                if (best_a == 0 || mae < best) {
                    best = mae;
                    best_a = ia;
                    best_b = ib;
                    best_g = ig;
                }
            }
        }
    }
    return TesParams(fit_grid_value(best_a), fit_grid_value(best_b), fit_grid_value(best_g), L, mode);
}

/// Fixed smoothing factors, or nullopt to fit them on the training window.
struct Smoothing {
    double alpha;
    double beta;
    double gamma;
};

struct PipelineOptions {
    std::size_t season_length = 0;  ///< 0: one day of samples at the series step
    std::optional<Smoothing> smoothing;
    SeasonalInit seasonal_init = SeasonalInit::additive;
};

struct PipelineResult {
    TesParams params;
    Forecast forecast;
    std::vector<Timestamp> times;  ///< instant of each forecast target
    std::vector<double> clear_sky;  ///< φ_s at each target, W/m²
    std::vector<double> irradiance;  ///< k̂ · φ_s, W/m²
};

/// Samples per day at `step`; validation error if a day is not a whole
/// number of steps.
inline std::size_t daily_season_length(std::int64_t step) {
    if (step <= 0 || 86400 % step != 0)
        throw Error(ErrorKind::validation, "a day is not a whole number of " + std::to_string(step) +
                                               " s steps; set the season length explicitly");
    return static_cast<std::size_t>(86400 / step);
}

/// Clear-sky model, clearness index, TES training on the trailing
/// `train_len` samples and an `m_max`-step forecast.
inline PipelineResult run_pipeline(const IrradianceSeries& measured, const SiteAtmosphere& atm, std::size_t train_len,
                                   std::size_t m_max, const PipelineOptions& options = {}) {
    const std::size_t L = options.season_length ? options.season_length : daily_season_length(measured.step());
    detail::require(m_max >= 1, "forecast horizon must be at least one step");
    if (train_len < 2 * L)
        throw Error(ErrorKind::insufficient_data, "training window of " + std::to_string(train_len) +
                                                      " samples is below the 2L = " + std::to_string(2 * L) +
                                                      " minimum");
    if (measured.size() < train_len)
        throw Error(ErrorKind::insufficient_data, "measured series has " + std::to_string(measured.size()) +
                                                      " samples, training needs " + std::to_string(train_len));

    const auto window = measured.slice(measured.size() - train_len, train_len);
    const auto clear = clear_sky_series(atm, window.start(), window.step(), window.size());
    const auto k = clearness_index(window, clear);
    if (k.valid_count() == 0)
        throw Error(ErrorKind::insufficient_data, "training window has no valid daytime samples (all masked)");

    const TesParams params = options.smoothing
                                 ? TesParams(options.smoothing->alpha, options.smoothing->beta,
                                             options.smoothing->gamma, L, options.seasonal_init)
                                 : fit(k, L, options.seasonal_init);
    const auto state = initialize(k, params);
    PipelineResult result{params, forecast(state, m_max), {}, {}, {}};
    for (const auto& point : result.forecast.horizon) {
        const Timestamp when = window.time_at(window.size() - 1) + static_cast<std::int64_t>(point.m) * window.step();
        const auto bird = bird_components(atm, when);
        const double cs = bird ? bird->total : 0.0;
        result.times.push_back(when);
        result.clear_sky.push_back(cs);
        result.irradiance.push_back(point.k_hat * cs);
    }
    return result;
}

} // namespace solarcast
