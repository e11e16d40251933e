#ifndef FLUCTLAB_EXPERIMENT_HPP
#define FLUCTLAB_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fluctlab/feedback.hpp"
#include "fluctlab/fluctuation.hpp"

namespace fluctlab {

// Process exit codes: 0 all asserted relations hold, 1 configuration parse
// error, 2 at least one relation failed or a contract error occurred,
// 3 I/O failure.
enum ExitCode : int {
    exit_ok = 0,
    exit_config = 1,
    exit_failed = 2,
    exit_io = 3,
};

enum class ExperimentKind { validate, jarzynski, crooks, heat, feedback, randomsuite };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

//=========================================================================
// ExperimentConfig
//=========================================================================

// Parsed experiment description.  Channel/observable/protocol sources stay
// as JSON fragments and are materialized per trial, so randomized sources
// draw from the trial's derived seed.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::validate;
    std::optional<std::uint64_t> seed;  // master seed
    std::int64_t trials = 1;
    double tolerance = kDefaultTol;

    nlohmann::json channel;       // channel source (validate/jarzynski/crooks/heat)
    nlohmann::json observable_a;  // first observable / Hamiltonian
    nlohmann::json observable_b;  // second observable / Hamiltonian
    nlohmann::json protocol;      // feedback protocol source
    double alpha = 1.0;
    double beta = 1.0;

    // randomsuite controls
    std::string relation;            // jarzynski | crooks | heat | feedback
    std::vector<int> dims{2, 3, 4};  // instance dimensions to draw from
    int unitaries = 4;               // mixture size for random bistochastic channels
    bool noisy = false;              // feedback: add a full-support error model
    std::array<double, 2> alpha_range{-2.0, 2.0};
    std::array<double, 2> beta_range{-2.0, 2.0};

    std::optional<std::filesystem::path> out_path;
    std::string format = "json";
    std::filesystem::path base_dir;  // resolves relative file references
};

// Reads and validates a config document.  Malformed structure, unknown
// experiment kinds, missing seeds for randomized runs, and invalid inline
// matrices all raise ParseError naming the offending field.  expected_kind
// (the CLI subcommand) supplies the kind when the config omits it and must
// agree with the config's "experiment" field when both are present.
ExperimentConfig parse_config(const nlohmann::json& j,
                              const std::filesystem::path& base_dir = ".",
                              std::optional<ExperimentKind> expected_kind = std::nullopt);
ExperimentConfig parse_config_file(const std::filesystem::path& path,
                                   std::optional<ExperimentKind> expected_kind = std::nullopt);

//=========================================================================
// RunReport
//=========================================================================

struct TrialRecord {
    std::int64_t trial;
    std::uint64_t seed;
    std::string kind;  // relation evaluated in this trial
    double lhs;
    double rhs;
    double gap;
    bool holds;
    double tp_defect;
    double unital_defect;
    std::optional<std::string> error;  // contract/structural failure text
};

struct RunReport {
    std::string experiment;
    std::uint64_t master_seed;
    std::int64_t trials;
    double tolerance;
    std::vector<TrialRecord> records;  // sorted by trial index
    double max_gap;
    std::int64_t pass_count;
    std::int64_t fail_count;
    bool any_contract_error;
    double wall_time_ms;

    int exit_code() const {
        return (fail_count > 0 || any_contract_error) ? exit_failed : exit_ok;
    }
};

// Runs every trial; deterministic per master seed (trial seeds come from
// derive_seed), independent of the worker count.
RunReport run_experiment(const ExperimentConfig& cfg, int jobs = 1);

//=========================================================================
// Report output
//=========================================================================

nlohmann::json report_to_json(const RunReport& report);
// Flattened rows: trial,seed,kind,lhs,rhs,gap,holds with '.' decimals,
// ',' separators, LF line endings, 17 significant digits.
std::string report_to_csv(const RunReport& report);

void emit_report(const RunReport& report, const std::string& format,
                 const std::filesystem::path& path);

}  // namespace fluctlab

#endif
