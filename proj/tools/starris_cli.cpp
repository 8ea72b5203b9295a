#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "starris/errors.hpp"
#include "starris/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitOracleSize = 4;

struct RunFlags {
    std::string preset = "desk";
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> mu;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--preset", f.preset, "base preset: desk or paper")->capture_default_str();
    cmd->add_option("--config", f.config, "key = value overrides applied on top of the preset");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--mu", f.mu, "element-count penalty weight");
}

starris::ExperimentConfig resolve(const RunFlags& f, starris::Mode mode) {
    starris::ExperimentConfig cfg = starris::preset_by_name(f.preset);
    if (!f.config.empty()) cfg = starris::load_config(f.config, cfg);
    if (f.seed) cfg.seed = *f.seed;
    if (f.out) cfg.output_dir = *f.out;
    if (f.mu) cfg.env.mu = *f.mu;
    cfg.mode = mode;
    cfg.validate();
    return cfg;
}

void summarize(const starris::ExperimentConfig& cfg, const starris::ExperimentResult& res) {
    using starris::MetricsRecord;
    const auto& rows = res.eval.empty() ? res.train : res.eval;
    std::cout << "wrote " << (cfg.output_dir / "metrics.csv").string() << "\n"
              << "final total rate (last 10 " << (res.eval.empty() ? "training" : "evaluation")
              << " episodes): " << starris::tail_mean(rows, 10, &MetricsRecord::total_rate) << " bps/Hz\n"
              << "final active elements: " << starris::tail_mean(rows, 10, &MetricsRecord::active_elements_mean)
              << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"STAR-RIS element assignment experiments"};
    app.require_subcommand(1);

    RunFlags train_f, base_f, oracle_f;
    auto* train = app.add_subcommand("train", "train the DDPG agent");
    add_run_flags(train, train_f);
    auto* baseline = app.add_subcommand("baseline", "equal-partition baseline with zero phases");
    add_run_flags(baseline, base_f);
    auto* oracle = app.add_subcommand("oracle", "exhaustive search on small instances");
    add_run_flags(oracle, oracle_f);

    std::string plots_out = "plots";
    std::vector<std::string> plot_inputs;
    auto* plots = app.add_subcommand("plots", "turn metrics CSVs into plot tables");
    plots->add_option("--out", plots_out, "output directory")->capture_default_str();
    plots->add_option("inputs", plot_inputs, "label=path/to/metrics.csv, one per curve")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*plots) {
            std::vector<std::pair<std::string, std::filesystem::path>> inputs;
            for (const auto& s : plot_inputs) {
                const auto eq = s.find('=');
                if (eq == std::string::npos || eq == 0) {
                    throw starris::ConfigError("inputs", "expected label=path, got '" + s + "'");
                }
                inputs.emplace_back(s.substr(0, eq), s.substr(eq + 1));
            }
            for (const auto& p : starris::emit_plot_data(inputs, plots_out)) std::cout << "wrote " << p.string() << "\n";
            return 0;
        }
        starris::ExperimentConfig cfg;
        if (*train) cfg = resolve(train_f, starris::Mode::kLearned);
        else if (*baseline) cfg = resolve(base_f, starris::Mode::kEqualPartition);
        else cfg = resolve(oracle_f, starris::Mode::kOracle);
        if (cfg.mode == starris::Mode::kOracle &&
            (cfg.env.elements() > starris::kOracleMaxElements || cfg.env.users() > starris::kOracleMaxUsers)) {
            throw starris::SizeError("oracle: instance has " + std::to_string(cfg.env.elements()) + " elements and " +
                                     std::to_string(cfg.env.users()) + " users; limits are 6 and 3");
        }
        summarize(cfg, starris::run_experiment_to_disk(cfg));
        return 0;
    } catch (const starris::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const starris::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const starris::SizeError& e) {
        std::cerr << "oracle size error: " << e.what() << "\n";
        return kExitOracleSize;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
