#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include "starris/errors.hpp"
#include "starris/harness.hpp"

namespace starris {

namespace {

constexpr std::uint64_t kEvalSeedOffset = 1ULL << 32;

struct EpisodeAccumulator {
    std::vector<double> rates;
    double reward = 0.0;
    double active = 0.0;
    std::size_t steps = 0;

    explicit EpisodeAccumulator(std::size_t users) : rates(users, 0.0) {}

    void add(const StepResult& r) {
        if (!r.decoded.assignment.columns_exclusive() || !r.decoded.assignment.rows_covered()) {
            throw ConstraintError("decoded assignment violates the element constraints");
        }
        std::size_t u = 0;
        for (double x : r.report.rate_t) rates[u++] += x;
        for (double x : r.report.rate_r) rates[u++] += x;
        reward += r.reward;
        active += static_cast<double>(r.active_count);
        ++steps;
    }

    MetricsRecord finish(std::size_t run, std::size_t episode, double seconds) const {
        MetricsRecord m;
        m.run = run;
        m.episode = episode;
        const double n = static_cast<double>(steps);
        for (double x : rates) m.user_rates.push_back(x / n);
        for (double x : m.user_rates) m.total_rate += x;
        m.reward_mean = reward / n;
        m.active_elements_mean = active / n;
        m.seconds = seconds;
        return m;
    }
};

Action oracle_action(const Environment& env, std::size_t grid) {
    const EnvConfig& c = env.config();
    const OracleResult o = brute_force_best_assignment(env.channels(), c.reflection_users(), c.transmission_users(),
                                                       c.budget, grid);
    Action a;
    for (double t : o.phases.theta) a.push_back(std::clamp(t / kPi - 1.0, -1.0, 1.0));
    const auto codes = encode_assignment(o.assignment);
    a.insert(a.end(), codes.begin(), codes.end());
    return a;
}

struct RunOutput {
    std::vector<MetricsRecord> train;
    std::vector<MetricsRecord> eval;
    RunTiming timing;
};

RunOutput run_one(const ExperimentConfig& cfg, std::size_t run) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t run_seed = mix_seed(cfg.seed + run);
    EnvConfig ec = cfg.env;
    ec.seed = run_seed;
    Environment env(ec);
    const std::size_t steps = cfg.steps_per_episode();
    const std::size_t total_steps = cfg.episodes * steps;
    const std::size_t users = ec.users();

    std::optional<DdpgAgent> agent;
    if (cfg.mode == Mode::kLearned) agent.emplace(ec.state_dim(), ec.elements(), cfg.agent, mix_seed(run_seed ^ 0xa6e17ULL));
    const Action fixed = cfg.mode == Mode::kEqualPartition ? equal_partition_action(ec) : Action{};

    RunOutput out;
    std::size_t global_step = 0;
    for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
        State s = env.reset(ep);
        EpisodeAccumulator acc(users);
        Action oracle_cached;
        for (std::size_t t = 0; t < steps; ++t, ++global_step) {
            Action a;
            switch (cfg.mode) {
            case Mode::kLearned:
                a = agent->act_noisy(s, exploration_sigma(global_step, total_steps, cfg.agent));
                break;
            case Mode::kEqualPartition:
                a = fixed;
                break;
            case Mode::kOracle:
                if (oracle_cached.empty() || ec.mobility == Mobility::kRandomWaypoint) {
                    oracle_cached = oracle_action(env, cfg.oracle_grid);
                }
                a = oracle_cached;
                break;
            }
            StepResult r = env.step(a);
            acc.add(r);
            if (agent) {
                agent->remember(Experience{s, a, r.reward, r.next_state});
                agent->train_step();
            }
            s = std::move(r.next_state);
        }
        out.train.push_back(acc.finish(run, ep, static_cast<double>((ep + 1) * steps)));

        if ((ep + 1) % cfg.eval_every == 0) {
            State es = env.reset(kEvalSeedOffset + ep);
            EpisodeAccumulator eval_acc(users);
            Action eval_oracle;
            for (std::size_t t = 0; t < steps; ++t) {
                Action a;
                if (agent) {
                    a = agent->act(es);
                } else if (cfg.mode == Mode::kOracle) {
                    if (eval_oracle.empty() || ec.mobility == Mobility::kRandomWaypoint) {
                        eval_oracle = oracle_action(env, cfg.oracle_grid);
                    }
                    a = eval_oracle;
                } else {
                    a = fixed;
                }
                StepResult r = env.step(a);
                eval_acc.add(r);
                es = std::move(r.next_state);
            }
            out.eval.push_back(eval_acc.finish(run, ep, static_cast<double>((ep + 1) * steps)));
        }
    }
    out.timing.run = run;
    out.timing.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

Action equal_partition_action(const EnvConfig& cfg) {
    const std::size_t n = cfg.elements();
    const AssignmentMatrix a = equal_partition_assignment(n, cfg.reflection_users(), cfg.transmission_users());
    Action act(n, -1.0);  // theta = pi (code + 1) = 0
    const auto codes = encode_assignment(a);
    act.insert(act.end(), codes.begin(), codes.end());
    return act;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<RunOutput> outputs(cfg.runs);
    if (cfg.parallel_runs && cfg.runs > 1) {
        std::vector<std::future<RunOutput>> futures;
        for (std::size_t r = 0; r < cfg.runs; ++r) {
            futures.push_back(std::async(std::launch::async, run_one, std::cref(cfg), r));
        }
        for (std::size_t r = 0; r < cfg.runs; ++r) outputs[r] = futures[r].get();
    } else {
        for (std::size_t r = 0; r < cfg.runs; ++r) outputs[r] = run_one(cfg, r);
    }
    ExperimentResult res;
    for (auto& o : outputs) {
        res.train.insert(res.train.end(), o.train.begin(), o.train.end());
        res.eval.insert(res.eval.end(), o.eval.begin(), o.eval.end());
        res.timing.push_back(o.timing);
    }
    return res;
}

ExperimentResult run_experiment_to_disk(const ExperimentConfig& cfg) {
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());
    ExperimentResult res = run_experiment(cfg);
    const std::size_t users = cfg.env.users();
    write_metrics_csv(cfg.output_dir / "metrics.csv", res.train, users);
    write_metrics_csv(cfg.output_dir / "eval.csv", res.eval, users);
    std::ofstream t(cfg.output_dir / "timing.csv");
    if (!t) throw IoError("cannot write timing.csv in " + cfg.output_dir.string());
    t << "run,wall_seconds\n";
    for (const auto& r : res.timing) t << r.run << ',' << format_double(r.wall_seconds) << '\n';
    return res;
}

std::string metrics_header(std::size_t users) {
    std::string h = "run,episode";
    for (std::size_t u = 1; u <= users; ++u) h += ",ue" + std::to_string(u);
    h += ",total_rate,reward_mean,active_elements_mean,seconds";
    return h;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records, std::size_t users) {
    out << metrics_header(users) << '\n';
    for (const auto& m : records) {
        if (m.user_rates.size() != users) throw ShapeError("write_metrics_csv: user column count mismatch");
        out << m.run << ',' << m.episode;
        for (double r : m.user_rates) out << ',' << format_double(r);
        out << ',' << format_double(m.total_rate) << ',' << format_double(m.reward_mean) << ','
            << format_double(m.active_elements_mean) << ',' << format_double(m.seconds) << '\n';
    }
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRecord>& records,
                       std::size_t users) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_metrics_csv(out, records, users);
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
    const std::size_t cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    if (cols < 7) throw IoError(path.string() + ": malformed header");
    const std::size_t users = cols - 6;
    std::vector<MetricsRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != cols) throw IoError(path.string() + ": row has " + std::to_string(cells.size()) + " cells");
        try {
            MetricsRecord m;
            m.run = std::stoul(cells[0]);
            m.episode = std::stoul(cells[1]);
            for (std::size_t u = 0; u < users; ++u) m.user_rates.push_back(std::stod(cells[2 + u]));
            m.total_rate = std::stod(cells[2 + users]);
            m.reward_mean = std::stod(cells[3 + users]);
            m.active_elements_mean = std::stod(cells[4 + users]);
            m.seconds = std::stod(cells[5 + users]);
            out.push_back(std::move(m));
        } catch (const std::logic_error&) {
            throw IoError(path.string() + ": non-numeric cell in '" + line + "'");
        }
    }
    return out;
}

double tail_mean(const std::vector<MetricsRecord>& records, std::size_t count, double MetricsRecord::*field) {
    std::map<std::size_t, std::vector<double>> by_run;
    for (const auto& m : records) by_run[m.run].push_back(m.*field);
    if (by_run.empty() || count == 0) throw DomainError("tail_mean: no records");
    double total = 0.0;
    for (const auto& [run, xs] : by_run) {
        const std::size_t take = std::min(count, xs.size());
        double s = 0.0;
        for (std::size_t i = xs.size() - take; i < xs.size(); ++i) s += xs[i];
        total += s / static_cast<double>(take);
    }
    return total / static_cast<double>(by_run.size());
}

std::vector<AggregateRow> aggregate_runs(const std::vector<MetricsRecord>& records) {
    std::map<std::size_t, std::vector<const MetricsRecord*>> by_episode;
    for (const auto& m : records) by_episode[m.episode].push_back(&m);
    std::vector<AggregateRow> out;
    for (const auto& [ep, ms] : by_episode) {
        AggregateRow row;
        row.episode = ep;
        row.user_rates.assign(ms.front()->user_rates.size(), 0.0);
        for (const auto* m : ms) {
            if (m->user_rates.size() != row.user_rates.size()) throw ShapeError("aggregate_runs: ragged user columns");
            for (std::size_t u = 0; u < row.user_rates.size(); ++u) row.user_rates[u] += m->user_rates[u];
            row.total_rate += m->total_rate;
            row.reward_mean += m->reward_mean;
            row.active_elements_mean += m->active_elements_mean;
        }
        const double n = static_cast<double>(ms.size());
        for (auto& r : row.user_rates) r /= n;
        row.total_rate /= n;
        row.reward_mean /= n;
        row.active_elements_mean /= n;
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace starris
