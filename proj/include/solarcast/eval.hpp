#pragma once

#include "solarcast/baselines.hpp"
#include "solarcast/clear_sky.hpp"
#include "solarcast/error.hpp"
#include "solarcast/format.hpp"
#include "solarcast/random.hpp"
#include "solarcast/tes.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace solarcast {

/// Mean absolute error over the pairs whose mask entry is set.
inline double mae(std::span<const double> predicted, std::span<const double> actual, const std::vector<bool>& mask) {
    detail::require(predicted.size() == actual.size() && actual.size() == mask.size(),
                    "predicted, actual and mask lengths differ");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (!mask[i]) continue;
        sum += std::abs(predicted[i] - actual[i]);
        ++n;
    }
    if (n == 0) throw Error(ErrorKind::insufficient_data, "MAE needs at least one valid pair");
    return sum / static_cast<double>(n);
}

struct BoxplotStats {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

inline constexpr std::string_view kQuartileConvention =
    "linear interpolation between order statistics, h = (n - 1) p (inclusive)";

/// Five-number summary plus mean. Quantiles interpolate linearly at
/// position (n − 1)·p of the sorted values.
inline BoxplotStats boxplot_stats(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorKind::insufficient_data, "box-plot statistics need at least one value");
    std::sort(values.begin(), values.end());
    auto quantile = [&](double p) {
        const double h = static_cast<double>(values.size() - 1) * p;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    BoxplotStats s;
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    return s;
}

enum class Method { tes, persistence, average };

inline constexpr std::string_view to_string(Method m) noexcept {
    switch (m) {
    case Method::tes: return "tes";
    case Method::persistence: return "persistence";
    case Method::average: return "average";
    }
    return "unknown";
}

inline Method parse_method(std::string_view text) {
    if (text == "tes") return Method::tes;
    if (text == "persistence") return Method::persistence;
    if (text == "average") return Method::average;
    throw Error(ErrorKind::validation, "unknown method '" + std::string(text) + "'");
}

struct ExperimentConfig {
    std::size_t train_len = 0;
    std::vector<std::size_t> lead_steps;
    std::size_t n_experiments = 1;
    std::uint64_t seed = 0;
    std::vector<Method> methods;

    std::size_t season_length = 0;   ///< 0: one day of samples at the data step
    std::size_t average_window = 0;  ///< 0: the whole training window
    std::optional<Smoothing> smoothing;  ///< nullopt: grid-fit TES on each training window
    SeasonalInit seasonal_init = SeasonalInit::additive;
    unsigned threads = 0;  ///< 0: hardware concurrency; never changes results
};

struct ExperimentRecord {
    std::size_t origin = 0;  ///< index of the last training sample
    Timestamp origin_time;
    std::size_t redraws = 0;
    std::optional<TesParams> tes_params;
};

struct ExperimentReport {
    std::string protocol;
    ExperimentConfig config;  ///< with season length and average window resolved
    std::int64_t step = 0;
    Timestamp data_start;
    std::size_t data_samples = 0;
    std::size_t data_valid = 0;
    std::vector<ExperimentRecord> experiments;
    /// mae[method][lead index][experiment]
    std::map<Method, std::vector<std::vector<double>>> mae;

    std::size_t total_redraws() const noexcept {
        std::size_t n = 0;
        for (const auto& e : experiments) n += e.redraws;
        return n;
    }

    BoxplotStats summary(Method m, std::size_t lead_index) const { return boxplot_stats(mae.at(m).at(lead_index)); }

    /// Mean MAE over every experiment and lead time.
    double pooled_mean(Method m) const {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& per_lead : mae.at(m)) {
            for (double v : per_lead) {
                sum += v;
                ++n;
            }
        }
        return sum / static_cast<double>(n);
    }

    double lead_minutes(std::size_t lead_index) const {
        return static_cast<double>(config.lead_steps.at(lead_index)) * static_cast<double>(step) / 60.0;
    }
};

namespace detail {

inline bool has_method(const std::vector<Method>& methods, Method m) {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
}

inline ExperimentConfig resolve_config(const ClearnessSeries& data, ExperimentConfig cfg) {
    if (cfg.lead_steps.empty()) throw Error(ErrorKind::validation, "at least one lead time is required");
    for (std::size_t i = 0; i < cfg.lead_steps.size(); ++i) {
        detail::require(cfg.lead_steps[i] >= 1, "lead steps must be at least 1");
        detail::require(i == 0 || cfg.lead_steps[i] > cfg.lead_steps[i - 1], "lead steps must be strictly increasing");
    }
    detail::require(cfg.n_experiments >= 1, "at least one experiment is required");
    detail::require(!cfg.methods.empty(), "at least one method is required");
    detail::require(cfg.train_len >= 1, "training length must be positive");
    std::vector<Method> unique;
    for (Method m : cfg.methods) {
        detail::require(!has_method(unique, m), "method '" + std::string(to_string(m)) + "' listed twice");
        unique.push_back(m);
    }
    if (cfg.season_length == 0) cfg.season_length = daily_season_length(data.step());
    if (cfg.average_window == 0) cfg.average_window = cfg.train_len;
    if (has_method(cfg.methods, Method::tes)) {
        const std::size_t L = cfg.season_length;
        detail::require(L >= 2, "season length must be at least 2");
        detail::require(cfg.train_len >= 2 * L, "training length " + std::to_string(cfg.train_len) +
                                                    " is below the TES minimum 2L = " + std::to_string(2 * L));
        if (cfg.smoothing) {
            TesParams(cfg.smoothing->alpha, cfg.smoothing->beta, cfg.smoothing->gamma, L, cfg.seasonal_init);
        } else {
            detail::require(cfg.train_len >= 3 * L, "fitting TES per experiment needs a training length of at least "
                                                        "3L = " + std::to_string(3 * L));
        }
    }
    return cfg;
}

struct ExperimentOutcome {
    ExperimentRecord record;
    std::map<Method, std::vector<double>> errors;  // per lead
};

inline bool targets_valid(const ClearnessSeries& data, std::size_t origin, const std::vector<std::size_t>& leads) {
    for (std::size_t m : leads) {
        if (!data.is_valid(origin + m)) return false;
    }
    return true;
}

/// Runs every method on the window ending at `origin`. nullopt when the
/// window cannot support one of them.
inline std::optional<std::map<Method, std::vector<double>>> evaluate_origin(const ClearnessSeries& data,
                                                                            const ExperimentConfig& cfg,
                                                                            std::size_t origin,
                                                                            std::optional<TesParams>& fitted) {
    const auto history = data.slice(origin + 1 - cfg.train_len, cfg.train_len);
    if (history.valid_count() == 0) return std::nullopt;
    const std::size_t m_max = cfg.lead_steps.back();
    std::map<Method, std::vector<double>> errors;
    try {
        for (Method method : cfg.methods) {
            Forecast f;
            switch (method) {
            case Method::tes: {
                const TesParams params =
                    cfg.smoothing ? TesParams(cfg.smoothing->alpha, cfg.smoothing->beta, cfg.smoothing->gamma,
                                              cfg.season_length, cfg.seasonal_init)
                                  : fit(history, cfg.season_length, cfg.seasonal_init);
                f = forecast(initialize(history, params), m_max);
                fitted = params;
                break;
            }
            case Method::persistence: f = persistence_forecast(history, m_max); break;
            case Method::average: f = average_forecast(history, cfg.average_window, m_max); break;
            }
            auto& per_lead = errors[method];
            for (std::size_t m : cfg.lead_steps) {
                const double predicted = f.horizon[m - 1].k_hat;
                const double actual = data.k_at(origin + m);
                per_lead.push_back(mae(std::span(&predicted, 1), std::span(&actual, 1), {true}));
            }
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::insufficient_data || e.kind() == ErrorKind::degenerate_cycle) return std::nullopt;
        throw;
    }
    return errors;
}

inline ExperimentReport run_experiments(const ClearnessSeries& data, const ExperimentConfig& raw_cfg,
                                        std::string protocol) {
    const ExperimentConfig cfg = resolve_config(data, raw_cfg);
    const std::size_t max_lead = cfg.lead_steps.back();
    if (data.size() < cfg.train_len + max_lead)
        throw Error(ErrorKind::configuration, "data has " + std::to_string(data.size()) +
                                                  " samples; a training window plus the longest lead needs " +
                                                  std::to_string(cfg.train_len + max_lead));
    const std::size_t first_origin = cfg.train_len - 1;
    const std::size_t candidates = data.size() - max_lead - first_origin;
    bool any = false;
    for (std::size_t o = first_origin; o < first_origin + candidates && !any; ++o) any = targets_valid(data, o, cfg.lead_steps);
    if (!any) throw Error(ErrorKind::configuration, "no admissible forecast origins (no window with valid targets)");
    const std::size_t max_attempts = std::max<std::size_t>(10000, 20 * candidates);

    std::vector<ExperimentOutcome> outcomes(cfg.n_experiments);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < cfg.n_experiments; i = next++) {
            try {
                Rng rng(mix_seed(cfg.seed, i));
                auto& out = outcomes[i];
                for (std::size_t attempt = 0;; ++attempt) {
                    if (attempt == max_attempts)
                        throw Error(ErrorKind::configuration, "experiment " + std::to_string(i) + " found no admissible "
                                                              "origin in " + std::to_string(max_attempts) + " draws");
                    const std::size_t origin = first_origin + rng.below(candidates);
                    std::optional<TesParams> fitted;
                    std::optional<std::map<Method, std::vector<double>>> errors;
                    if (targets_valid(data, origin, cfg.lead_steps)) errors = evaluate_origin(data, cfg, origin, fitted);
                    if (!errors) {
                        ++out.record.redraws;
                        continue;
                    }
                    out.record.origin = origin;
                    out.record.origin_time = data.time_at(origin);
                    out.record.tes_params = fitted;
                    out.errors = std::move(*errors);
                    break;
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = cfg.n_experiments;
            }
        }
    };

    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.n_experiments));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    ExperimentReport report;
    report.protocol = std::move(protocol);
    report.config = cfg;
    report.step = data.step();
    report.data_start = data.start();
    report.data_samples = data.size();
    report.data_valid = data.valid_count();
    for (Method m : cfg.methods)
        report.mae[m].assign(cfg.lead_steps.size(), std::vector<double>(cfg.n_experiments, 0.0));
    for (std::size_t i = 0; i < cfg.n_experiments; ++i) {
        report.experiments.push_back(outcomes[i].record);
        for (const auto& [method, per_lead] : outcomes[i].errors)
            for (std::size_t l = 0; l < per_lead.size(); ++l) report.mae[method][l][i] = per_lead[l];
    }
    return report;
}

} // namespace detail

/// Randomized lead-time study: TES only, full per-lead MAE distributions.
inline ExperimentReport leadtime_study(const ClearnessSeries& data, const ExperimentConfig& cfg) {
    if (cfg.methods.size() != 1 || cfg.methods.front() != Method::tes)
        throw Error(ErrorKind::validation, "the lead-time study evaluates the tes method only");
    return detail::run_experiments(data, cfg, "leadtime_study");
}

/// Paired benchmark: every method sees the same windows and targets.
inline ExperimentReport benchmark(const ClearnessSeries& data, const ExperimentConfig& cfg) {
    for (Method m : {Method::tes, Method::persistence, Method::average}) {
        if (!detail::has_method(cfg.methods, m))
            throw Error(ErrorKind::validation, "benchmark requires method '" + std::string(to_string(m)) + "'");
    }
    return detail::run_experiments(data, cfg, "benchmark");
}

inline nlohmann::ordered_json to_json(const ExperimentReport& report) {
    using nlohmann::ordered_json;
    const auto& cfg = report.config;

    ordered_json config;
    config["train_len"] = cfg.train_len;
    config["season_length"] = cfg.season_length;
    config["step_seconds"] = report.step;
    config["lead_steps"] = cfg.lead_steps;
    ordered_json minutes = ordered_json::array();
    for (std::size_t l = 0; l < cfg.lead_steps.size(); ++l) minutes.push_back(report.lead_minutes(l));
    config["lead_minutes"] = minutes;
    config["n_experiments"] = cfg.n_experiments;
    config["seed"] = cfg.seed;
    ordered_json methods = ordered_json::array();
    for (Method m : cfg.methods) methods.push_back(to_string(m));
    config["methods"] = methods;
    if (detail::has_method(cfg.methods, Method::average)) config["average_window"] = cfg.average_window;
    if (detail::has_method(cfg.methods, Method::tes)) {
        ordered_json tes;
        if (cfg.smoothing) {
            tes["smoothing"] = {{"alpha", cfg.smoothing->alpha}, {"beta", cfg.smoothing->beta},
                                {"gamma", cfg.smoothing->gamma}};
        } else {
            tes["smoothing"] = "grid fit per experiment: alpha, beta, gamma in {0.05, ..., 0.95}, "
                               "one-step MAE after 2L warm-up, ties to lowest alpha, beta, gamma";
        }
        tes["seasonal_init"] = to_string(cfg.seasonal_init);
        config["tes"] = tes;
    }
    config["origin_sampling"] = "uniform over [train_len - 1, n - 1 - max_lead], redraw when inadmissible";
    config["target_policy"] = "daytime (mask-valid) targets only";
    config["per_experiment_mae"] = "absolute error of the single target at each lead";
    config["aggregate"] = "pooled mean MAE over all experiments and lead times";
    config["quartile_convention"] = kQuartileConvention;

    ordered_json doc;
    doc["protocol"] = report.protocol;
    doc["config"] = config;
    doc["data"] = {{"start", report.data_start.iso8601()},
                   {"samples", report.data_samples},
                   {"valid_samples", report.data_valid}};
    doc["redraws"] = report.total_redraws();

    ordered_json experiments = ordered_json::array();
    for (std::size_t i = 0; i < report.experiments.size(); ++i) {
        const auto& e = report.experiments[i];
        ordered_json item{{"index", i},
                          {"origin_index", e.origin},
                          {"origin_time", e.origin_time.iso8601()},
                          {"redraws", e.redraws}};
        if (e.tes_params)
            item["tes_params"] = {{"alpha", e.tes_params->alpha()},
                                  {"beta", e.tes_params->beta()},
                                  {"gamma", e.tes_params->gamma()}};
        experiments.push_back(item);
    }
    doc["experiments"] = experiments;

    ordered_json mae_doc, summary, pooled;
    for (Method m : cfg.methods) {
        const auto name = std::string(to_string(m));
        mae_doc[name] = report.mae.at(m);
        ordered_json rows = ordered_json::array();
        for (std::size_t l = 0; l < cfg.lead_steps.size(); ++l) {
            const auto s = report.summary(m, l);
            rows.push_back({{"lead_steps", cfg.lead_steps[l]},
                            {"lead_minutes", report.lead_minutes(l)},
                            {"min", s.min},
                            {"q1", s.q1},
                            {"median", s.median},
                            {"q3", s.q3},
                            {"max", s.max},
                            {"mean", s.mean}});
        }
        summary[name] = rows;
        pooled[name] = report.pooled_mean(m);
    }
    doc["mae"] = mae_doc;
    doc["summary"] = summary;
    doc["pooled_mean_mae"] = pooled;
    return doc;
}

/// `method,lead_minutes,experiment,mae` rows for external plotting.
inline void write_report_csv(std::ostream& out, const ExperimentReport& report) {
    out << "method,lead_minutes,experiment,mae\n";
    for (Method m : report.config.methods) {
        const auto& per_lead = report.mae.at(m);
        for (std::size_t l = 0; l < per_lead.size(); ++l) {
            const auto minutes = format_double(report.lead_minutes(l));
            for (std::size_t i = 0; i < per_lead[l].size(); ++i)
                out << to_string(m) << ',' << minutes << ',' << i << ',' << format_double(per_lead[l][i]) << '\n';
        }
    }
}

} // namespace solarcast
