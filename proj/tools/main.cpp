#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "hazardlab/errors.hpp"
#include "hazardlab/version.hpp"

namespace cli = hazardlab::cli;

namespace {

void add_common(CLI::App* cmd, cli::CommonArgs& common) {
    cmd->add_option("--out", common.out, "Output directory")->required();
    cmd->add_option("--seed", common.seed, "Random seed");
    cmd->add_flag("--force", common.force, "Overwrite existing outputs");
    cmd->add_flag("--quiet", common.quiet, "Suppress warnings and progress notes");
}

void add_session_flags(CLI::App* cmd, int& window, bool& no_exclusions) {
    cmd->add_option("--window", window, "Rolling-median window (odd probe count)");
    cmd->add_flag("--no-exclusions", no_exclusions, "Skip subject exclusion rules");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hazardlab: trust-rating timing analysis for robot grasp sessions"};
    app.set_version_flag("--version", std::string("hazardlab ") + hazardlab::kVersion);
    app.require_subcommand(1);

    cli::SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Generate synthetic sessions and ground truth");
    add_common(c_sim, sim.common);
    c_sim->add_option("--config", sim.config_path, "JSON config file (flags override)");
    c_sim->add_option("--subjects", sim.subjects, "Number of subjects");
    c_sim->add_option("--echo-failure", sim.echo_failure, "Echo misplacement probability");
    c_sim->add_option("--delta-up", sim.delta_up, "Slider points gained on success");
    c_sim->add_option("--delta-down", sim.delta_down, "Slider points lost on failure");
    c_sim->add_option("--rtt-ms", sim.rtt_ms, "Simulated constant round-trip time (ms)");

    cli::IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Parse, latency-correct, exclude, segment");
    add_common(c_ingest, ingest.common);
    c_ingest->add_option("--events", ingest.events, "Event log (JSONL)")->required();
    add_session_flags(c_ingest, ingest.window, ingest.no_exclusions);
    c_ingest->add_option("--latency-threshold", ingest.latency_threshold,
                         "Median RTT exclusion threshold (ms)");
    c_ingest->add_option("--duration-factor", ingest.duration_factor,
                         "Trial-duration exclusion factor over the cohort median");
    c_ingest->add_option("--expected-trials", ingest.expected_trials,
                         "Trials required for a complete session");
    c_ingest->add_option("--grasps-per-trial", ingest.grasps_per_trial,
                         "Grasps per trial for completeness");

    cli::AnalyzeArgs analyze;
    auto* c_analyze = app.add_subcommand("analyze", "Descriptive trust-change analytics");
    add_common(c_analyze, analyze.common);
    c_analyze->add_option("--events", analyze.events, "Event log (JSONL)")->required();
    add_session_flags(c_analyze, analyze.window, analyze.no_exclusions);
    c_analyze->add_option("--bin-width", analyze.bin_width, "Histogram bin width (s)");
    c_analyze->add_option("--center", analyze.center, "Rating-time origin: place|pick");
    c_analyze->add_option("--pairing", analyze.pairing, "t-test pairing: subject|grasp");

    cli::FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "Fit the hazard model by MCMC");
    add_common(c_fit, fit.common);
    c_fit->add_option("--events", fit.events, "Event log (JSONL)")->required();
    c_fit->add_option("--cohort", fit.cohort, "early (grasps 1-3) or final")->required();
    c_fit->add_option("--width", fit.width, "Interval width (s)");
    c_fit->add_option("--chains", fit.chains, "Number of chains");
    c_fit->add_option("--draws", fit.draws, "Draws per chain after warmup");
    c_fit->add_option("--warmup", fit.warmup, "Warmup iterations per chain");
    c_fit->add_option("--target-accept", fit.target_accept, "Proposal adaptation target");
    c_fit->add_flag("--censored", fit.censored,
                    "Let unrated grasps contribute exposure (off by default)");
    add_session_flags(c_fit, fit.window, fit.no_exclusions);

    cli::DiagnoseArgs diagnose;
    auto* c_diag = app.add_subcommand("diagnose", "Convergence diagnostics for a posterior");
    c_diag->add_option("--posterior", diagnose.posterior, "posterior.csv path")->required();
    c_diag->add_option("--threshold", diagnose.threshold, "r_hat gate");
    c_diag->add_flag("--quiet", diagnose.quiet, "Suppress warnings");

    cli::PredictArgs predict;
    auto* c_predict = app.add_subcommand("predict", "Posterior-predictive survival curves");
    add_common(c_predict, predict.common);
    c_predict->add_option("--events", predict.events, "Event log (JSONL)")->required();
    c_predict->add_option("--posterior", predict.posterior, "posterior.csv path")->required();
    c_predict->add_option("--cohort", predict.cohort, "early or final")->required();
    c_predict->add_option("--grid-max", predict.grid_max, "Grid end (s); 0 = cohort default");
    c_predict->add_option("--grid-step", predict.grid_step, "Grid step (s)");
    c_predict->add_option("--n-draws", predict.n_draws, "Posterior draws to sample");
    c_predict->add_option("--max-rows", predict.max_rows, "Covariate rows cap (0 = all)");
    add_session_flags(c_predict, predict.window, predict.no_exclusions);

    cli::ReportArgs report;
    auto* c_report = app.add_subcommand("report", "All figures and tables in one directory");
    add_common(c_report, report.analyze.common);
    c_report->add_option("--events", report.analyze.events, "Event log (JSONL)")->required();
    c_report->add_option("--posterior", report.predict.posterior, "posterior.csv path")
        ->required();
    c_report->add_option("--cohort", report.predict.cohort, "early or final");
    c_report->add_option("--bin-width", report.analyze.bin_width, "Histogram bin width (s)");
    add_session_flags(c_report, report.analyze.window, report.analyze.no_exclusions);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        app.exit(e);
        return 1;
    }
    sim.seed_set = c_sim->count("--seed") > 0;

    try {
        if (*c_sim) return cli::cmd_simulate(sim);
        if (*c_ingest) return cli::cmd_ingest(ingest);
        if (*c_analyze) return cli::cmd_analyze(analyze);
        if (*c_fit) return cli::cmd_fit(fit);
        if (*c_diag) return cli::cmd_diagnose(diagnose);
        if (*c_predict) return cli::cmd_predict(predict);
        if (*c_report) {
            report.predict.events = report.analyze.events;
            report.predict.common = report.analyze.common;
            report.predict.window = report.analyze.window;
            report.predict.no_exclusions = report.analyze.no_exclusions;
            return cli::cmd_report(report);
        }
    } catch (const hazardlab::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const hazardlab::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
