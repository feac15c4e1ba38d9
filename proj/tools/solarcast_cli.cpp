// solarcast: clear-sky curves, clearness index, TES forecasts, benchmarks
// and synthetic irradiance years from the command line.
//
// Exit codes: 0 success, 1 invalid invocation or configuration,
// 2 data or insufficiency errors.

#include "solarcast/solarcast.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using namespace solarcast;
using Metadata = std::vector<std::pair<std::string, std::string>>;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::validation, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Writes to `path`, or stdout when empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
    if (path.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::validation, "cannot write '" + path + "'");
    write(out);
}

SiteAtmosphere load_site(const std::string& path) {
    try {
        return parse_site_config(read_file(path));
    } catch (const Error& e) {
        throw Error(ErrorKind::validation, path + ": " + e.what());
    }
}

IrradianceSeries load_measured(const std::string& path, std::int64_t resample_step) {
    auto series = parse_csv(read_file(path));
    if (resample_step > 0 && resample_step != series.step()) series = resample(series, resample_step);
    return series;
}

std::size_t parse_count(const std::string& text, const char* what) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != text.size() || text.front() == '-')
        throw Error(ErrorKind::validation, std::string("malformed ") + what + " '" + text + "'");
    return static_cast<std::size_t>(v);
}

/// "1728" samples, or "6L" seasons.
std::size_t parse_train(const std::string& text, std::size_t L) {
    if (!text.empty() && (text.back() == 'L' || text.back() == 'l'))
        return parse_count(text.substr(0, text.size() - 1), "training length") * L;
    return parse_count(text, "training length");
}

/// "20m" or "20" minutes → whole steps.
std::size_t lead_minutes_to_steps(std::string text, std::int64_t step) {
    if (!text.empty() && text.back() == 'm') text.pop_back();
    const auto minutes = parse_double(text);
    if (!minutes || !(*minutes > 0.0)) throw Error(ErrorKind::validation, "malformed lead time '" + text + "'");
    const double steps = *minutes * 60.0 / static_cast<double>(step);
    if (std::abs(steps - std::round(steps)) > 1e-9)
        throw Error(ErrorKind::validation, "lead time " + text + " min is not a whole number of " +
                                               std::to_string(step) + " s steps");
    return static_cast<std::size_t>(std::llround(steps));
}

struct SmoothingFlags {
    std::optional<double> alpha, beta, gamma;
    bool fit = false;

    std::optional<Smoothing> resolve() const {
        const int given = alpha.has_value() + beta.has_value() + gamma.has_value();
        if (given == 0) return std::nullopt;
        if (fit) throw Error(ErrorKind::validation, "--fit cannot be combined with --alpha/--beta/--gamma");
        if (given != 3) throw Error(ErrorKind::validation, "--alpha, --beta and --gamma must be given together");
        return Smoothing{*alpha, *beta, *gamma};
    }

    void add_to(CLI::App* cmd) {
        cmd->add_option("--alpha", alpha, "Level smoothing factor in (0, 1)");
        cmd->add_option("--beta", beta, "Trend smoothing factor in (0, 1)");
        cmd->add_option("--gamma", gamma, "Seasonal smoothing factor in (0, 1)");
        cmd->add_flag("--fit", fit, "Grid-fit alpha, beta, gamma on the training window (default)");
    }
};

std::size_t resolve_season(std::size_t flag, std::int64_t step) {
    return flag ? flag : daily_season_length(step);
}

void require_train(std::size_t train, std::size_t L) {
    if (train < 2 * L)
        throw Error(ErrorKind::validation, "training length " + std::to_string(train) +
                                               " is below the TES minimum of 2L = " + std::to_string(2 * L) +
                                               " samples (two full seasons)");
}

void write_clearness_csv(std::ostream& out, const ClearnessSeries& k, const Metadata& meta) {
    for (const auto& [key, value] : meta) out << "# " << key << '=' << value << '\n';
    out << "timestamp_utc,k,valid\n";
    for (std::size_t i = 0; i < k.size(); ++i)
        out << k.time_at(i).iso8601() << ',' << format_double(k.k_at(i)) << ',' << (k.is_valid(i) ? 1 : 0) << '\n';
}

ClearnessSeries clearness_for(const IrradianceSeries& measured, const SiteAtmosphere& site) {
    const auto clear = clear_sky_series(site, measured.start(), measured.step(), measured.size());
    return clearness_index(measured, clear);
}

struct EvalFlags {
    std::string measured, site, train, json_out, csv_out, methods, seasonal_init = "additive";
    std::vector<std::string> leads{"5", "10", "15", "20"};
    std::size_t experiments = 0, average_window = 0, season_length = 0;
    std::uint64_t seed = 0;
    std::int64_t resample_step = 0;
    unsigned threads = 0;
    SmoothingFlags smoothing;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--measured", measured, "Measured irradiance CSV")->required();
        cmd->add_option("--site", site, "Site/atmosphere config file")->required();
        cmd->add_option("--resample", resample_step, "Resample the measured series to this step (s) first");
        cmd->add_option("--train", train, "Training window: samples, or seasons with an L suffix");
        cmd->add_option("--leads", leads, "Lead times in minutes")->delimiter(',');
        cmd->add_option("--experiments", experiments, "Number of randomized experiments");
        cmd->add_option("--seed", seed, "Master seed");
        cmd->add_option("--season-length", season_length, "Season length L in samples (default: one day)");
        cmd->add_option("--average-window", average_window, "Average baseline window (default: training length)");
        cmd->add_option("--seasonal-init", seasonal_init, "additive | paper-ratio");
        cmd->add_option("--threads", threads, "Worker threads (0 = all cores; results do not depend on it)");
        cmd->add_option("--json", json_out, "Report JSON path (default: stdout)");
        cmd->add_option("--csv", csv_out, "Per-experiment MAE CSV path");
        smoothing.add_to(cmd);
    }
};

int run_eval(const EvalFlags& f, bool is_benchmark) {
    const auto site = load_site(f.site);
    const auto measured = load_measured(f.measured, f.resample_step);
    const std::size_t L = resolve_season(f.season_length, measured.step());

    ExperimentConfig cfg;
    cfg.season_length = L;
    cfg.train_len = f.train.empty() ? (is_benchmark ? 4 : 6) * L : parse_train(f.train, L);
    require_train(cfg.train_len, L);
    for (const auto& lead : f.leads) cfg.lead_steps.push_back(lead_minutes_to_steps(lead, measured.step()));
    cfg.n_experiments = f.experiments ? f.experiments : (is_benchmark ? 100 : 150);
    cfg.seed = f.seed;
    if (f.methods.empty()) {
        cfg.methods = is_benchmark ? std::vector{Method::tes, Method::persistence, Method::average}
                                   : std::vector{Method::tes};
    } else {
        std::stringstream list(f.methods);
        for (std::string item; std::getline(list, item, ',');) cfg.methods.push_back(parse_method(item));
    }
    cfg.average_window = f.average_window;
    cfg.smoothing = f.smoothing.resolve();
    cfg.seasonal_init = parse_seasonal_init(f.seasonal_init);
    cfg.threads = f.threads;

    const auto k = clearness_for(measured, site);
    const auto report = is_benchmark ? benchmark(k, cfg) : leadtime_study(k, cfg);

    auto doc = to_json(report);
    nlohmann::ordered_json site_doc;
    for (const auto& [key, value] : site_metadata(site)) site_doc[key] = std::stod(value);
    doc["site"] = site_doc;
    doc["input"] = {{"measured_step_seconds", measured.step()}, {"resample_seconds", f.resample_step}};
    emit(f.json_out, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
    if (!f.csv_out.empty()) emit(f.csv_out, [&](std::ostream& out) { write_report_csv(out, report); });
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Intra-hour solar irradiance forecasting with triple exponential smoothing"};
    app.require_subcommand(1);

    // clearsky
    std::string cs_site, cs_start, cs_out;
    double cs_hours = 24.0;
    std::int64_t cs_step = 300;
    auto* clearsky = app.add_subcommand("clearsky", "Bird clear-sky GHI curve");
    clearsky->add_option("--site", cs_site, "Site/atmosphere config file")->required();
    clearsky->add_option("--start", cs_start, "Start instant, YYYY-MM-DDThh:mm:ssZ")->required();
    clearsky->add_option("--hours", cs_hours, "Duration in hours");
    clearsky->add_option("--step", cs_step, "Step in seconds");
    clearsky->add_option("--out", cs_out, "Output CSV (default: stdout)");

    // kindex
    std::string ki_measured, ki_site, ki_out;
    std::int64_t ki_resample = 0;
    auto* kindex = app.add_subcommand("kindex", "Clearness index of a measured series");
    kindex->add_option("--measured", ki_measured, "Measured irradiance CSV")->required();
    kindex->add_option("--site", ki_site, "Site/atmosphere config file")->required();
    kindex->add_option("--resample", ki_resample, "Resample to this step (s) first");
    kindex->add_option("--out", ki_out, "Output CSV (default: stdout)");

    // forecast
    std::string fc_measured, fc_site, fc_train = "6L", fc_lead = "20m", fc_out, fc_init = "additive";
    std::size_t fc_season = 0;
    std::int64_t fc_resample = 0;
    SmoothingFlags fc_smoothing;
    auto* fc = app.add_subcommand("forecast", "TES forecast of k and GHI after the end of a measured series");
    fc->add_option("--measured", fc_measured, "Measured irradiance CSV")->required();
    fc->add_option("--site", fc_site, "Site/atmosphere config file")->required();
    fc->add_option("--resample", fc_resample, "Resample to this step (s) first");
    fc->add_option("--train", fc_train, "Training window: samples, or seasons with an L suffix");
    fc->add_option("--lead", fc_lead, "Longest lead time in minutes, e.g. 20m");
    fc->add_option("--season-length", fc_season, "Season length L in samples (default: one day)");
    fc->add_option("--seasonal-init", fc_init, "additive | paper-ratio");
    fc->add_option("--out", fc_out, "Output CSV (default: stdout)");
    fc_smoothing.add_to(fc);

    // benchmark, leadtime-study
    EvalFlags bench_flags, study_flags;
    auto* bench = app.add_subcommand("benchmark", "Paired TES / persistence / average benchmark");
    bench_flags.add_to(bench);
    bench->add_option("--methods", bench_flags.methods, "Comma-separated methods");
    auto* study = app.add_subcommand("leadtime-study", "Randomized TES error-versus-lead-time study");
    study_flags.add_to(study);

    // synth
    std::string sy_site, sy_out;
    int sy_year = 2015;
    std::uint64_t sy_seed = 0;
    double sy_depth = 0.6, sy_persistence = 0.9;
    std::int64_t sy_step = 300;
    auto* synth = app.add_subcommand("synth", "Synthetic year of GHI with AR(1) cloud cover");
    synth->add_option("--site", sy_site, "Site/atmosphere config file")->required();
    synth->add_option("--year", sy_year, "Calendar year");
    synth->add_option("--seed", sy_seed, "Random seed");
    synth->add_option("--cloud-depth", sy_depth, "Deepest cloud attenuation in [0, 1]");
    synth->add_option("--cloud-persistence", sy_persistence, "AR(1) coefficient per step in (0, 1)");
    synth->add_option("--step", sy_step, "Step in seconds");
    synth->add_option("--out", sy_out, "Output CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (*clearsky) {
        const auto site = load_site(cs_site);
        const auto start = Timestamp::parse_iso8601(cs_start);
        if (cs_step <= 0) throw Error(ErrorKind::validation, "--step must be positive");
        const double samples = cs_hours * 3600.0 / static_cast<double>(cs_step);
        if (!(samples >= 1.0) || std::abs(samples - std::round(samples)) > 1e-9)
            throw Error(ErrorKind::validation, "--hours must cover a positive whole number of steps");
        const auto series = clear_sky_series(site, start, cs_step, static_cast<std::size_t>(std::llround(samples)));
        auto meta = site_metadata(site);
        meta.emplace_back("step_seconds", std::to_string(cs_step));
        emit(cs_out, [&](std::ostream& out) { write_csv(out, series, meta); });
    } else if (*kindex) {
        const auto site = load_site(ki_site);
        const auto measured = load_measured(ki_measured, ki_resample);
        auto meta = site_metadata(site);
        meta.emplace_back("step_seconds", std::to_string(measured.step()));
        meta.emplace_back("night_threshold_wm2", format_double(kNightThreshold));
        meta.emplace_back("k_max", format_double(kMaxClearness));
        emit(ki_out, [&](std::ostream& out) { write_clearness_csv(out, clearness_for(measured, site), meta); });
    } else if (*fc) {
        const auto site = load_site(fc_site);
        const auto smoothing = fc_smoothing.resolve();
        const auto init = parse_seasonal_init(fc_init);
        const auto measured = load_measured(fc_measured, fc_resample);
        const std::size_t L = resolve_season(fc_season, measured.step());
        const std::size_t train = parse_train(fc_train, L);
        require_train(train, L);
        const std::size_t m_max = lead_minutes_to_steps(fc_lead, measured.step());
        if (smoothing) TesParams(smoothing->alpha, smoothing->beta, smoothing->gamma, L, init);

        const auto result = run_pipeline(measured, site, train, m_max, {L, smoothing, init});
        auto meta = site_metadata(site);
        meta.emplace_back("step_seconds", std::to_string(measured.step()));
        meta.emplace_back("season_length", std::to_string(L));
        meta.emplace_back("train_len", std::to_string(train));
        meta.emplace_back("lead_steps", std::to_string(m_max));
        meta.emplace_back("alpha", format_double(result.params.alpha()));
        meta.emplace_back("beta", format_double(result.params.beta()));
        meta.emplace_back("gamma", format_double(result.params.gamma()));
        meta.emplace_back("smoothing", smoothing ? "fixed" : "grid-fit");
        meta.emplace_back("seasonal_init", std::string(to_string(init)));
        emit(fc_out, [&](std::ostream& out) {
            for (const auto& [key, value] : meta) out << "# " << key << '=' << value << '\n';
            out << "timestamp_utc,lead_steps,lead_minutes,k_hat,clear_sky_wm2,ghi_wm2\n";
            for (std::size_t i = 0; i < result.forecast.horizon.size(); ++i) {
                const auto& p = result.forecast.horizon[i];
                out << result.times[i].iso8601() << ',' << p.m << ','
                    << format_double(static_cast<double>(p.m * measured.step()) / 60.0) << ','
                    << format_double(p.k_hat) << ',' << format_double(result.clear_sky[i]) << ','
                    << format_double(result.irradiance[i]) << '\n';
            }
        });
    } else if (*bench) {
        return run_eval(bench_flags, true);
    } else if (*study) {
        return run_eval(study_flags, false);
    } else if (*synth) {
        SynthConfig config{load_site(sy_site), sy_year, sy_step, sy_persistence, sy_depth, sy_seed};
        const auto series = synthesize_year(config);
        auto meta = site_metadata(config.site);
        meta.emplace_back("year", std::to_string(sy_year));
        meta.emplace_back("step_seconds", std::to_string(sy_step));
        meta.emplace_back("seed", std::to_string(sy_seed));
        meta.emplace_back("cloud_depth", format_double(sy_depth));
        meta.emplace_back("cloud_persistence", format_double(sy_persistence));
        emit(sy_out, [&](std::ostream& out) { write_csv(out, series, meta); });
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const solarcast::Error& e) {
        std::cerr << "error: " << solarcast::to_string(e.kind()) << ": " << e.what() << '\n';
        return e.kind() == solarcast::ErrorKind::validation ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 2;
    }
}
