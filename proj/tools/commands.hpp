#ifndef HAZARDLAB_TOOLS_COMMANDS_HPP
#define HAZARDLAB_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <string>

namespace hazardlab::cli {

struct CommonArgs {
    std::string out;
    std::uint64_t seed = 0;
    bool force = false;
    bool quiet = false;
};

struct SimulateArgs {
    CommonArgs common;
    std::string config_path; // optional JSON config; flags override
    int subjects = -1;       // -1 = keep config/default
    double echo_failure = -1.0;
    double delta_up = -1.0;
    double delta_down = -1.0;
    double rtt_ms = -1.0;
    bool seed_set = false;
};

struct IngestArgs {
    CommonArgs common;
    std::string events;
    int window = 5;
    double latency_threshold = 300.0;
    double duration_factor = 3.0;
    int expected_trials = 10;
    int grasps_per_trial = 4;
    bool no_exclusions = false;
};

struct AnalyzeArgs {
    CommonArgs common;
    std::string events;
    int window = 5;
    double bin_width = 1.0;
    std::string center = "place";
    std::string pairing = "subject";
    bool no_exclusions = false;
};

struct FitArgs {
    CommonArgs common;
    std::string events;
    std::string cohort = "early";
    double width = 0.5;
    int chains = 4;
    int draws = 5000;
    int warmup = 2000;
    double target_accept = 0.30;
    bool censored = false;
    int window = 5;
    bool no_exclusions = false;
};

struct DiagnoseArgs {
    std::string posterior;
    double threshold = 1.05;
    bool quiet = false;
};

struct PredictArgs {
    CommonArgs common;
    std::string events;
    std::string posterior;
    std::string cohort = "early";
    double grid_max = 0.0; // 0 = cohort default (30 early, 60 final)
    double grid_step = 0.1;
    int n_draws = 60;
    int max_rows = 200;
    int window = 5;
    bool no_exclusions = false;
};

struct ReportArgs {
    AnalyzeArgs analyze;
    PredictArgs predict;
};

int cmd_simulate(const SimulateArgs& args);
int cmd_ingest(const IngestArgs& args);
int cmd_analyze(const AnalyzeArgs& args);
int cmd_fit(const FitArgs& args);
int cmd_diagnose(const DiagnoseArgs& args);
int cmd_predict(const PredictArgs& args);
int cmd_report(const ReportArgs& args);

} // namespace hazardlab::cli

#endif
