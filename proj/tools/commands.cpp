#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "hazardlab/analytics.hpp"
#include "hazardlab/csv.hpp"
#include "hazardlab/errors.hpp"
#include "hazardlab/inference.hpp"
#include "hazardlab/pipeline.hpp"
#include "hazardlab/plots.hpp"
#include "hazardlab/predict.hpp"
#include "hazardlab/simulate.hpp"
#include "hazardlab/version.hpp"

namespace hazardlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kRhatGate = 1.05;

void info(const CommonArgs& common, const std::string& message) {
    if (!common.quiet) std::cerr << message << '\n';
}

void print_warnings(const CommonArgs& common, const std::vector<std::string>& warnings) {
    if (common.quiet) return;
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

fs::path prepare_out_dir(const CommonArgs& common, const std::vector<std::string>& outputs) {
    if (common.out.empty()) throw ConfigError("--out is required");
    const fs::path dir(common.out);
    fs::create_directories(dir);
    if (!common.force) {
        for (const auto& name : outputs) {
            if (fs::exists(dir / name)) {
                throw ConfigError("output file already exists (use --force): " +
                                  (dir / name).string());
            }
        }
    }
    return dir;
}

class ManifestTimer {
public:
    ManifestTimer(std::string command, fs::path dir)
        : command_(std::move(command)), dir_(std::move(dir)),
          start_(std::chrono::steady_clock::now()) {}

    json config = json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;

    void commit() const {
        const double duration =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json entry;
        entry["command"] = command_;
        entry["config"] = config;
        entry["inputs"] = inputs;
        entry["outputs"] = outputs;
        entry["seed"] = seed;
        entry["version"] = kVersion;
        entry["duration_s"] = duration;
        entry["timestamp"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();
        std::ofstream out(dir_ / "manifest.jsonl", std::ios::app);
        out << entry.dump() << '\n';
    }

private:
    std::string command_;
    fs::path dir_;
    std::chrono::steady_clock::time_point start_;
};

void write_text_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + path.string());
    out << contents;
}

double json_number(const json& j, const char* field, double fallback) {
    auto it = j.find(field);
    if (it == j.end()) return fallback;
    if (!it->is_number()) throw ConfigError(std::string("config field '") + field +
                                            "' must be a number");
    return it->get<double>();
}

SimConfig parse_sim_config(const json& j) {
    SimConfig config;
    static const std::vector<std::string> known{
        "n_subjects",      "trials_per_subject", "grasps_per_trial", "echo_failure_prob",
        "t_place_mean",    "t_place_sd",         "inter_grasp_gap",  "final_grasp_horizon",
        "true_params",     "trust",              "latency",          "seed"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config field '" + key + "'");
        }
    }
    config.n_subjects = static_cast<int>(json_number(j, "n_subjects", config.n_subjects));
    config.trials_per_subject =
        static_cast<int>(json_number(j, "trials_per_subject", config.trials_per_subject));
    config.grasps_per_trial =
        static_cast<int>(json_number(j, "grasps_per_trial", config.grasps_per_trial));
    config.echo_failure_prob = json_number(j, "echo_failure_prob", config.echo_failure_prob);
    config.t_place_mean = json_number(j, "t_place_mean", config.t_place_mean);
    config.t_place_sd = json_number(j, "t_place_sd", config.t_place_sd);
    config.inter_grasp_gap = json_number(j, "inter_grasp_gap", config.inter_grasp_gap);
    config.final_grasp_horizon =
        json_number(j, "final_grasp_horizon", config.final_grasp_horizon);
    if (j.contains("true_params")) {
        const json& p = j.at("true_params");
        config.true_params.log_lambda0 =
            json_number(p, "log_lambda0", config.true_params.log_lambda0);
        config.true_params.beta_success =
            json_number(p, "beta_success", config.true_params.beta_success);
        config.true_params.beta_trust =
            json_number(p, "beta_trust", config.true_params.beta_trust);
        config.true_params.eta = json_number(p, "eta", config.true_params.eta);
    }
    if (j.contains("trust")) {
        const json& t = j.at("trust");
        config.trust.delta_up = json_number(t, "delta_up", config.trust.delta_up);
        config.trust.delta_down = json_number(t, "delta_down", config.trust.delta_down);
        config.trust.initial = json_number(t, "initial", config.trust.initial);
    }
    if (j.contains("latency")) {
        const json& l = j.at("latency");
        config.latency.rtt_mean_ms = json_number(l, "rtt_mean_ms", config.latency.rtt_mean_ms);
        config.latency.rtt_sd_ms = json_number(l, "rtt_sd_ms", config.latency.rtt_sd_ms);
        config.latency.probe_period_s =
            json_number(l, "probe_period_s", config.latency.probe_period_s);
    }
    config.seed = static_cast<std::uint64_t>(json_number(j, "seed", 0.0));
    return config;
}

json sim_config_to_json(const SimConfig& c) {
    json j;
    j["n_subjects"] = c.n_subjects;
    j["trials_per_subject"] = c.trials_per_subject;
    j["grasps_per_trial"] = c.grasps_per_trial;
    j["echo_failure_prob"] = c.echo_failure_prob;
    j["t_place_mean"] = c.t_place_mean;
    j["t_place_sd"] = c.t_place_sd;
    j["inter_grasp_gap"] = c.inter_grasp_gap;
    j["final_grasp_horizon"] = c.final_grasp_horizon;
    j["true_params"] = {{"log_lambda0", c.true_params.log_lambda0},
                        {"beta_success", c.true_params.beta_success},
                        {"beta_trust", c.true_params.beta_trust},
                        {"eta", c.true_params.eta}};
    j["trust"] = {{"delta_up", c.trust.delta_up},
                  {"delta_down", c.trust.delta_down},
                  {"initial", c.trust.initial}};
    j["latency"] = {{"rtt_mean_ms", c.latency.rtt_mean_ms},
                    {"rtt_sd_ms", c.latency.rtt_sd_ms},
                    {"probe_period_s", c.latency.probe_period_s}};
    j["seed"] = c.seed;
    return j;
}

Cohort parse_cohort(const std::string& name) {
    if (name == "early") return Cohort::early;
    if (name == "final") return Cohort::final;
    throw ConfigError("cohort must be 'early' or 'final'");
}

SessionOptions session_options(int window, bool no_exclusions) {
    SessionOptions options;
    options.latency_window = window;
    options.apply_exclusion_rules = !no_exclusions;
    return options;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct AnalyzeOutputs {
    std::vector<std::string> csvs{"trust_change_summary.csv", "t_test.csv",
                                  "grasp_distribution.csv", "rating_time_hist_early.csv",
                                  "rating_time_hist_final.csv"};
    std::vector<std::string> svgs{"trust_change_box.svg", "grasp_distribution.svg",
                                  "rating_time_hist.svg"};
};

void run_analyze_into(const AnalyzeArgs& args, const fs::path& dir, ManifestTimer& manifest) {
    Session session = load_session(args.events, session_options(args.window, args.no_exclusions));
    print_warnings(args.common, session.warnings);

    const TrustChangeSummary summary = trust_change_by_algorithm(session.episodes);
    {
        std::ostringstream out;
        write_trust_change_csv(out, summary);
        write_text_file(dir / "trust_change_summary.csv", out.str());
    }

    std::vector<std::string> pairing_warnings;
    std::vector<std::pair<double, double>> pairs;
    if (args.pairing == "subject") {
        pairs = per_subject_change_pairs(session.episodes, &pairing_warnings);
    } else if (args.pairing == "grasp") {
        // Index-paired rated grasps per subject, pooled.
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_subject;
        for (const GraspEpisode& ep : session.episodes) {
            if (!ep.trust_change) continue;
            auto& [g, e] = by_subject[ep.subject];
            (ep.algorithm == Algorithm::gamma ? g : e).push_back(*ep.trust_change);
        }
        for (const auto& [subject, ge] : by_subject) {
            const std::size_t n = std::min(ge.first.size(), ge.second.size());
            for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(ge.first[i], ge.second[i]);
        }
    } else {
        throw ConfigError("--pairing must be 'subject' or 'grasp'");
    }
    print_warnings(args.common, pairing_warnings);
    {
        std::ostringstream out;
        if (pairs.size() >= 2) {
            write_t_test_csv(out, paired_t_test(pairs));
        } else {
            csv::Writer w(out);
            w.header({"n_pairs", "mean_diff", "t_statistic", "degrees_of_freedom", "p_value",
                      "degenerate"});
            info(args.common, "warning: fewer than 2 paired subjects; t-test skipped");
        }
        write_text_file(dir / "t_test.csv", out.str());
    }

    {
        std::ostringstream out;
        write_grasp_distribution_csv(out, rating_distribution_by_grasp(session.episodes));
        write_text_file(dir / "grasp_distribution.csv", out.str());
    }

    const TimeCenter center = [&] {
        if (args.center == "place") return TimeCenter::place;
        if (args.center == "pick") return TimeCenter::pick;
        throw ConfigError("--center must be 'place' or 'pick'");
    }();
    const auto [early_hist, final_hist] =
        rating_time_histograms(session.episodes, args.bin_width, center);
    if (early_hist.total + final_hist.total == 0) {
        info(args.common, "warning: no rated grasps; histograms are empty");
    }
    {
        std::ostringstream out;
        write_histogram_csv(out, early_hist);
        write_text_file(dir / "rating_time_hist_early.csv", out.str());
    }
    {
        std::ostringstream out;
        write_histogram_csv(out, final_hist);
        write_text_file(dir / "rating_time_hist_final.csv", out.str());
    }

    // Plots are rendered from the CSVs just written, never from a second
    // computation path.
    plot_trust_change_box(csv::read_file((dir / "trust_change_summary.csv").string()),
                          (dir / "trust_change_box.svg").string());
    plot_grasp_distribution(csv::read_file((dir / "grasp_distribution.csv").string()),
                            (dir / "grasp_distribution.svg").string());
    plot_rating_time_histograms(csv::read_file((dir / "rating_time_hist_early.csv").string()),
                                csv::read_file((dir / "rating_time_hist_final.csv").string()),
                                (dir / "rating_time_hist.svg").string());

    manifest.inputs.push_back(args.events);
    const AnalyzeOutputs names;
    manifest.outputs.insert(manifest.outputs.end(), names.csvs.begin(), names.csvs.end());
    manifest.outputs.insert(manifest.outputs.end(), names.svgs.begin(), names.svgs.end());
    manifest.config["bin_width"] = args.bin_width;
    manifest.config["center"] = args.center;
    manifest.config["pairing"] = args.pairing;
    manifest.config["latency_window"] = args.window;
    manifest.config["exclusions"] = !args.no_exclusions;
}

struct PredictOutputs {
    std::vector<double> grid;
    PosteriorCurves curves;
    SurvivalCurve empirical;
};

PredictOutputs run_predict_core(const PredictArgs& args) {
    Session session = load_session(args.events, session_options(args.window, args.no_exclusions));
    print_warnings(args.common, session.warnings);
    const Cohort cohort = parse_cohort(args.cohort);

    std::vector<CovariateRow> rows = rated_covariate_rows(session.episodes, cohort);
    if (rows.empty()) throw DataError("zero rated episodes in cohort '" + args.cohort + "'");
    if (args.max_rows > 0 && rows.size() > static_cast<std::size_t>(args.max_rows)) {
        Rng rng(derive_seed(args.common.seed, 0x726f7773));
        for (std::size_t i = 0; i < static_cast<std::size_t>(args.max_rows); ++i) {
            std::swap(rows[i], rows[i + rng.integer(rows.size() - i)]);
        }
        rows.resize(static_cast<std::size_t>(args.max_rows));
    }

    std::ifstream posterior_in(args.posterior);
    if (!posterior_in) throw DataError("cannot open posterior file: " + args.posterior);
    const PosteriorChains chains = read_posterior_csv(posterior_in);

    const double grid_max =
        args.grid_max > 0.0 ? args.grid_max : (cohort == Cohort::early ? 30.0 : 60.0);
    PredictOutputs out;
    out.grid = uniform_grid(0.0, grid_max, args.grid_step);
    const int n_draws = std::min<int>(
        args.n_draws, static_cast<int>(chains.chains.size() * chains.draws_per_chain()));
    out.curves = posterior_survival_curves(chains, rows, out.grid, n_draws, args.common.seed);
    std::vector<std::string> warnings;
    out.empirical = empirical_survival(rated_times(session.episodes, cohort), out.grid, &warnings);
    print_warnings(args.common, warnings);
    return out;
}

void fill_predict_manifest(ManifestTimer& manifest, const PredictArgs& args) {
    manifest.inputs = {args.events, args.posterior};
    manifest.config["cohort"] = args.cohort;
    manifest.config["grid_step"] = args.grid_step;
    manifest.config["n_draws"] = args.n_draws;
    manifest.config["max_rows"] = args.max_rows;
    manifest.seed = args.common.seed;
}

} // namespace

int cmd_simulate(const SimulateArgs& args) {
    json config_json = json::object();
    if (!args.config_path.empty()) {
        try {
            config_json = json::parse(slurp(args.config_path));
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad config file: ") + e.what());
        }
    }
    SimConfig config = parse_sim_config(config_json);
    if (args.subjects >= 0) config.n_subjects = args.subjects;
    if (args.echo_failure >= 0.0) config.echo_failure_prob = args.echo_failure;
    if (args.delta_up >= 0.0) config.trust.delta_up = args.delta_up;
    if (args.delta_down >= 0.0) config.trust.delta_down = args.delta_down;
    if (args.rtt_ms >= 0.0) config.latency.rtt_mean_ms = args.rtt_ms;
    if (args.seed_set) config.seed = args.common.seed;
    validate(config);

    const fs::path dir = prepare_out_dir(args.common, {"events.jsonl", "ground_truth.csv"});
    ManifestTimer manifest("simulate", dir);
    const SimResult sim = simulate_sessions(config);
    if (config.n_subjects == 0) {
        info(args.common, "warning: n_subjects is 0; writing an empty event log");
    }
    {
        std::ostringstream out;
        write_event_log(out, sim.log);
        write_text_file(dir / "events.jsonl", out.str());
    }
    {
        std::ostringstream out;
        write_ground_truth_csv(out, sim.truth);
        write_text_file(dir / "ground_truth.csv", out.str());
    }
    manifest.config = sim_config_to_json(config);
    manifest.seed = config.seed;
    manifest.outputs = {"events.jsonl", "ground_truth.csv"};
    if (!args.config_path.empty()) manifest.inputs.push_back(args.config_path);
    manifest.commit();
    info(args.common, "simulated " + std::to_string(sim.truth.size()) + " grasps from " +
                          std::to_string(config.n_subjects) + " subjects");
    return 0;
}

int cmd_ingest(const IngestArgs& args) {
    SessionOptions options = session_options(args.window, args.no_exclusions);
    options.rules.latency_ms = args.latency_threshold;
    options.rules.trial_duration_factor = args.duration_factor;
    options.rules.expected_trials = args.expected_trials;
    options.rules.grasps_per_trial = args.grasps_per_trial;

    const fs::path dir = prepare_out_dir(args.common, {"episodes.csv", "exclusions.csv"});
    ManifestTimer manifest("ingest", dir);
    Session session = load_session(args.events, options);
    print_warnings(args.common, session.warnings);
    {
        std::ostringstream out;
        write_episode_csv(out, session.episodes);
        write_text_file(dir / "episodes.csv", out.str());
    }
    {
        std::ostringstream out;
        write_exclusion_csv(out, session.exclusions);
        write_text_file(dir / "exclusions.csv", out.str());
    }
    manifest.inputs = {args.events};
    manifest.outputs = {"episodes.csv", "exclusions.csv"};
    manifest.config["latency_window"] = args.window;
    manifest.config["latency_threshold_ms"] = args.latency_threshold;
    manifest.config["trial_duration_factor"] = args.duration_factor;
    manifest.config["exclusions"] = !args.no_exclusions;
    manifest.commit();
    info(args.common,
         "wrote " + std::to_string(session.episodes.size()) + " episodes (" +
             std::to_string(session.exclusions.included.size()) + " subjects included, " +
             std::to_string(session.exclusions.excluded.size()) + " excluded, " +
             std::to_string(session.dropped_picks) + " picks dropped)");
    return 0;
}

int cmd_analyze(const AnalyzeArgs& args) {
    const AnalyzeOutputs names;
    std::vector<std::string> all = names.csvs;
    all.insert(all.end(), names.svgs.begin(), names.svgs.end());
    const fs::path dir = prepare_out_dir(args.common, all);
    ManifestTimer manifest("analyze", dir);
    run_analyze_into(args, dir, manifest);
    manifest.commit();
    return 0;
}

int cmd_fit(const FitArgs& args) {
    const fs::path dir =
        prepare_out_dir(args.common, {"intervals.csv", "posterior.csv", "summary.csv"});
    ManifestTimer manifest("fit", dir);

    Session session = load_session(args.events, session_options(args.window, args.no_exclusions));
    print_warnings(args.common, session.warnings);
    const Cohort cohort = parse_cohort(args.cohort);
    const auto observations = collect_observations(session.episodes, cohort, args.censored);
    bool any_rated = false;
    for (const auto& obs : observations) any_rated = any_rated || obs.rating.has_value();
    if (!any_rated) throw DataError("zero rated episodes in cohort '" + args.cohort + "'");

    const IntervalTable table = expand_to_intervals(observations, args.width, cohort);
    {
        std::ostringstream out;
        write_interval_csv(out, table);
        write_text_file(dir / "intervals.csv", out.str());
    }

    FitConfig config;
    config.chains = args.chains;
    config.draws = args.draws;
    config.warmup = args.warmup;
    config.seed = args.common.seed;
    config.target_accept = args.target_accept;
    const PosteriorChains chains = fit(table, config);
    {
        std::ostringstream out;
        write_posterior_csv(out, chains);
        write_text_file(dir / "posterior.csv", out.str());
    }
    const ParamSummary summary = summarize(chains);
    {
        std::ostringstream out;
        write_summary_csv(out, summary);
        write_text_file(dir / "summary.csv", out.str());
    }

    manifest.inputs = {args.events};
    manifest.outputs = {"intervals.csv", "posterior.csv", "summary.csv"};
    manifest.config["cohort"] = args.cohort;
    manifest.config["width"] = args.width;
    manifest.config["chains"] = args.chains;
    manifest.config["draws"] = args.draws;
    manifest.config["warmup"] = args.warmup;
    manifest.config["censored"] = args.censored;
    manifest.seed = args.common.seed;
    manifest.commit();

    bool converged = true;
    std::cout << "parameter mean sd r_hat\n";
    for (const ParamStats& p : summary.params) {
        std::cout << p.name << ' ' << p.mean << ' ' << p.sd << ' ';
        if (p.rhat.degenerate) {
            std::cout << "degenerate";
            converged = false;
        } else {
            std::cout << p.rhat.value;
            if (p.rhat.value >= kRhatGate) converged = false;
        }
        std::cout << '\n';
    }
    std::cout << (converged ? "r_hat gate: pass (< 1.05)\n" : "r_hat gate: FAIL (>= 1.05)\n");
    return converged ? 0 : 3;
}

int cmd_diagnose(const DiagnoseArgs& args) {
    std::ifstream in(args.posterior);
    if (!in) throw DataError("cannot open posterior file: " + args.posterior);
    const PosteriorChains chains = read_posterior_csv(in);
    bool converged = true;
    std::cout << "parameter r_hat\n";
    for (int k = 0; k < 4; ++k) {
        const RhatResult r = split_rhat(chains, k);
        std::cout << kParamNames[static_cast<std::size_t>(k)] << ' ';
        if (r.degenerate) {
            std::cout << "degenerate\n";
            converged = false;
        } else {
            std::cout << r.value << '\n';
            if (r.value >= args.threshold) converged = false;
        }
    }
    std::cout << (converged ? "converged\n" : "not converged\n");
    return converged ? 0 : 3;
}

int cmd_predict(const PredictArgs& args) {
    const fs::path dir =
        prepare_out_dir(args.common, {"curves.csv", "band.csv", "survival.svg"});
    ManifestTimer manifest("predict", dir);
    const PredictOutputs out = run_predict_core(args);
    {
        std::ostringstream text;
        write_curves_csv(text, out.curves, 100);
        write_text_file(dir / "curves.csv", text.str());
    }
    {
        std::ostringstream text;
        write_band_csv(text, out.curves, out.empirical);
        write_text_file(dir / "band.csv", text.str());
    }
    plot_survival_overlay(csv::read_file((dir / "band.csv").string()),
                          csv::read_file((dir / "curves.csv").string()),
                          (dir / "survival.svg").string());
    fill_predict_manifest(manifest, args);
    manifest.outputs = {"curves.csv", "band.csv", "survival.svg"};
    manifest.commit();
    return 0;
}

int cmd_report(const ReportArgs& args) {
    const AnalyzeOutputs names;
    std::vector<std::string> all = names.csvs;
    all.insert(all.end(), names.svgs.begin(), names.svgs.end());
    all.push_back("band.csv");
    all.push_back("survival.svg");
    const fs::path dir = prepare_out_dir(args.analyze.common, all);
    ManifestTimer manifest("report", dir);
    run_analyze_into(args.analyze, dir, manifest);

    const PredictOutputs out = run_predict_core(args.predict);
    {
        std::ostringstream text;
        write_band_csv(text, out.curves, out.empirical);
        write_text_file(dir / "band.csv", text.str());
    }
    plot_survival_overlay(csv::read_file((dir / "band.csv").string()), csv::Table{},
                          (dir / "survival.svg").string());
    manifest.inputs.push_back(args.predict.posterior);
    manifest.outputs.push_back("band.csv");
    manifest.outputs.push_back("survival.svg");
    manifest.config["cohort"] = args.predict.cohort;
    manifest.commit();
    return 0;
}

} // namespace hazardlab::cli
