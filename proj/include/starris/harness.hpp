#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "starris/agent.hpp"
#include "starris/env.hpp"

namespace starris {

enum class Mode { kLearned, kEqualPartition, kOracle };

struct ExperimentConfig {
    EnvConfig env;
    AgentHyperparams agent;
    std::size_t episodes = 210;
    std::size_t runs = 4;
    std::size_t eval_every = 10;  // evaluation episode after every n-th training episode
    std::size_t oracle_grid = 4;  // phase levels per element for oracle mode
    Mode mode = Mode::kLearned;
    std::uint64_t seed = 1;
    bool parallel_runs = true;
    std::filesystem::path output_dir = "out";

    std::size_t steps_per_episode() const { return env.episode_length; }
    void validate() const;
};

// N = 16, K = L = 2, static, 50 episodes x 200 steps, 2 runs.
ExperimentConfig desk_preset();
// N = 144, K = L = 3, static, 210 episodes x 1000 steps, 4 runs.
ExperimentConfig paper_preset();
ExperimentConfig preset_by_name(const std::string& name);

/// Applies `[section]` / `key = value` text on top of `base`. Unknown keys,
/// malformed values and invalid results raise ConfigError with the field name.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base);
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base);

/// One row per (run, episode). User columns follow the figure numbering:
/// transmission users first, then reflection users.
struct MetricsRecord {
    std::size_t run = 0;
    std::size_t episode = 0;
    std::vector<double> user_rates;  // mean bps/Hz over the episode
    double total_rate = 0.0;
    double reward_mean = 0.0;
    double active_elements_mean = 0.0;
    double seconds = 0.0;  // simulated time at the end of the episode (one step = 1 s)
};

struct RunTiming {
    std::size_t run = 0;
    double wall_seconds = 0.0;
};

struct ExperimentResult {
    std::vector<MetricsRecord> train;
    std::vector<MetricsRecord> eval;
    std::vector<RunTiming> timing;
};

// Runs every seed and returns the merged records ordered by (run, episode).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Runs and writes metrics.csv, eval.csv and timing.csv under cfg.output_dir.
ExperimentResult run_experiment_to_disk(const ExperimentConfig& cfg);

std::string metrics_header(std::size_t users);
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records, std::size_t users);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRecord>& records,
                       std::size_t users);
std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);

// Mean over the last `count` records of each run, then over runs.
double tail_mean(const std::vector<MetricsRecord>& records, std::size_t count, double MetricsRecord::*field);

// Action that decodes to the equal partition with every phase at zero.
Action equal_partition_action(const EnvConfig& cfg);

struct OracleResult {
    AssignmentMatrix assignment;
    PhaseConfig phases;
    double total_sinr = 0.0;
};

inline constexpr std::size_t kOracleMaxElements = 6;
inline constexpr std::size_t kOracleMaxUsers = 3;
inline constexpr std::size_t kOracleMaxGrid = 8;

/// Exhaustive maximisation of the summed SINR over every valid assignment and
/// every phase on a uniform grid of `grid` levels in [0, 2pi). Throws SizeError
/// beyond N = 6, K + L = 3 or 8 levels.
OracleResult brute_force_best_assignment(const ChannelSet& channels, std::size_t k, std::size_t l,
                                         const LinkBudget& budget, std::size_t grid);

// Summed SINR of a configuration.
double total_sinr(const RateReport& report);

/// Per-episode run averages.
struct AggregateRow {
    std::size_t episode = 0;
    std::vector<double> user_rates;
    double total_rate = 0.0;
    double reward_mean = 0.0;
    double active_elements_mean = 0.0;
};

std::vector<AggregateRow> aggregate_runs(const std::vector<MetricsRecord>& records);

/// Writes rates_<label>.tsv per input plus active_elements.tsv and
/// total_rate.tsv with one column per label. Returns the files written.
std::vector<std::filesystem::path> emit_plot_data(
    const std::vector<std::pair<std::string, std::filesystem::path>>& inputs, const std::filesystem::path& out_dir);

// Reads a tab-separated table written by emit_plot_data: header row then numeric rows.
std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_table(const std::filesystem::path& path);

}  // namespace starris
