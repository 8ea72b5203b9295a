#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "starris/errors.hpp"
#include "starris/harness.hpp"

namespace starris {

namespace {

std::vector<Position3D> paper_transmission_users() { return {{55, 25, 1.5}, {50, 22, 1.5}, {70, 35, 1.5}}; }
std::vector<Position3D> paper_reflection_users() { return {{40, 15, 1.5}, {45, 18, 1.5}, {25, 5, 1.5}}; }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a number, got '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& field, const std::string& v) {
    try {
        if (v.empty() || v[0] == '-') throw std::invalid_argument("negative");
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a non-negative integer, got '" + v + "'");
    }
}

Position3D parse_position(const std::string& field, const std::string& v) {
    std::stringstream ss(v);
    std::string part;
    std::vector<double> xs;
    while (std::getline(ss, part, ',')) xs.push_back(parse_double(field, trim(part)));
    if (xs.size() != 3) throw ConfigError(field, "expected x,y,z");
    return {xs[0], xs[1], xs[2]};
}

// Semicolon-separated list of x,y,z triples.
std::vector<Position3D> parse_positions(const std::string& field, const std::string& v) {
    std::vector<Position3D> out;
    std::stringstream ss(v);
    std::string part;
    while (std::getline(ss, part, ';')) {
        part = trim(part);
        if (!part.empty()) out.push_back(parse_position(field, part));
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto num = [&t](const std::string& key, auto member_fn) {
            t[key] = [member_fn](ExperimentConfig& c, const std::string& f, const std::string& v) {
                member_fn(c) = parse_double(f, v);
            };
        };
        auto count = [&t](const std::string& key, auto member_fn) {
            t[key] = [member_fn](ExperimentConfig& c, const std::string& f, const std::string& v) {
                member_fn(c) = static_cast<std::size_t>(parse_u64(f, v));
            };
        };

        count("experiment.episodes", [](ExperimentConfig& c) -> std::size_t& { return c.episodes; });
        count("experiment.steps_per_episode", [](ExperimentConfig& c) -> std::size_t& { return c.env.episode_length; });
        count("experiment.runs", [](ExperimentConfig& c) -> std::size_t& { return c.runs; });
        count("experiment.eval_every", [](ExperimentConfig& c) -> std::size_t& { return c.eval_every; });
        count("experiment.oracle_grid", [](ExperimentConfig& c) -> std::size_t& { return c.oracle_grid; });
        t["experiment.seed"] = [](ExperimentConfig& c, const std::string& f, const std::string& v) {
            c.seed = parse_u64(f, v);
        };
        t["experiment.mode"] = [](ExperimentConfig& c, const std::string& f, const std::string& v) {
            if (v == "learned") c.mode = Mode::kLearned;
            else if (v == "equal-partition") c.mode = Mode::kEqualPartition;
            else if (v == "oracle") c.mode = Mode::kOracle;
            else throw ConfigError(f, "expected learned|equal-partition|oracle");
        };
        t["experiment.parallel_runs"] = [](ExperimentConfig& c, const std::string& f, const std::string& v) {
            if (v == "true") c.parallel_runs = true;
            else if (v == "false") c.parallel_runs = false;
            else throw ConfigError(f, "expected true|false");
        };
        t["experiment.output_dir"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.output_dir = v;
        };

        count("env.n_h", [](ExperimentConfig& c) -> std::size_t& { return c.env.shape.n_h; });
        count("env.n_v", [](ExperimentConfig& c) -> std::size_t& { return c.env.shape.n_v; });
        count("env.antennas", [](ExperimentConfig& c) -> std::size_t& { return c.env.shape.m; });
        num("env.mu", [](ExperimentConfig& c) -> double& { return c.env.mu; });
        num("env.box_side", [](ExperimentConfig& c) -> double& { return c.env.mobility_box_side; });
        num("env.speed", [](ExperimentConfig& c) -> double& { return c.env.mobility_speed; });
        t["env.mobility"] = [](ExperimentConfig& c, const std::string& f, const std::string& v) {
            if (v == "static") c.env.mobility = Mobility::kStatic;
            else if (v == "rwp") c.env.mobility = Mobility::kRandomWaypoint;
            else throw ConfigError(f, "expected static|rwp");
        };

        num("channel.f_c", [](ExperimentConfig& c) -> double& { return c.env.path_loss.f_c; });
        num("channel.zeta_ris", [](ExperimentConfig& c) -> double& { return c.env.path_loss.zeta_ris; });
        num("channel.zeta_direct", [](ExperimentConfig& c) -> double& { return c.env.path_loss.zeta_direct; });
        num("channel.d0", [](ExperimentConfig& c) -> double& { return c.env.path_loss.d0; });
        num("channel.direct_los", [](ExperimentConfig& c) -> double& { return c.env.rician.direct_los; });
        num("channel.direct_nlos", [](ExperimentConfig& c) -> double& { return c.env.rician.direct_nlos; });
        num("channel.ris_user_los", [](ExperimentConfig& c) -> double& { return c.env.rician.ris_user_los; });
        num("channel.ris_user_nlos", [](ExperimentConfig& c) -> double& { return c.env.rician.ris_user_nlos; });
        num("channel.bs_ris_los", [](ExperimentConfig& c) -> double& { return c.env.rician.bs_ris_los; });
        num("channel.bs_ris_nlos", [](ExperimentConfig& c) -> double& { return c.env.rician.bs_ris_nlos; });
        t["channel.kappa"] = [](ExperimentConfig& c, const std::string& f, const std::string& v) {
            const double k = parse_double(f, v);
            c.env.rician = RicianParams{k, k, k, k, k, k};
        };

        num("budget.power_w", [](ExperimentConfig& c) -> double& { return c.env.budget.p; });
        num("budget.bandwidth_hz", [](ExperimentConfig& c) -> double& { return c.env.budget.bandwidth; });
        num("budget.noise_density_dbm_hz",
            [](ExperimentConfig& c) -> double& { return c.env.budget.noise_density_dbm_hz; });

        t["positions.bs"] = [](ExperimentConfig& c, const std::string& f, const std::string& v) {
            c.env.scene.bs = parse_position(f, v);
        };
        t["positions.ris"] = [](ExperimentConfig& c, const std::string& f, const std::string& v) {
            c.env.scene.ris = parse_position(f, v);
        };
        t["positions.reflection_users"] = [](ExperimentConfig& c, const std::string& f, const std::string& v) {
            c.env.scene.users_r = parse_positions(f, v);
        };
        t["positions.transmission_users"] = [](ExperimentConfig& c, const std::string& f, const std::string& v) {
            c.env.scene.users_t = parse_positions(f, v);
        };

        num("agent.eta", [](ExperimentConfig& c) -> double& { return c.agent.eta; });
        num("agent.eta_a", [](ExperimentConfig& c) -> double& { return c.agent.eta_a; });
        num("agent.eta_c", [](ExperimentConfig& c) -> double& { return c.agent.eta_c; });
        num("agent.lambda", [](ExperimentConfig& c) -> double& { return c.agent.lambda_soft; });
        num("agent.sigma_start", [](ExperimentConfig& c) -> double& { return c.agent.sigma_start; });
        num("agent.sigma_end", [](ExperimentConfig& c) -> double& { return c.agent.sigma_end; });
        num("agent.sigma_decay_fraction", [](ExperimentConfig& c) -> double& { return c.agent.sigma_decay_fraction; });
        count("agent.batch", [](ExperimentConfig& c) -> std::size_t& { return c.agent.batch; });
        count("agent.buffer", [](ExperimentConfig& c) -> std::size_t& { return c.agent.buffer_capacity; });
        count("agent.layers", [](ExperimentConfig& c) -> std::size_t& { return c.agent.hidden_layers; });
        count("agent.width", [](ExperimentConfig& c) -> std::size_t& { return c.agent.hidden_width; });
        return t;
    }();
    return table;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (episodes == 0) throw ConfigError("experiment.episodes", "must be at least 1");
    if (runs == 0) throw ConfigError("experiment.runs", "must be at least 1");
    if (eval_every == 0) throw ConfigError("experiment.eval_every", "must be at least 1");
    if (oracle_grid == 0 || oracle_grid > kOracleMaxGrid) {
        throw ConfigError("experiment.oracle_grid", "must lie in 1..8");
    }
    env.validate();
    agent.validate();
}

ExperimentConfig paper_preset() {
    ExperimentConfig c;
    c.env.shape = ArrayShape{12, 12, 4};
    c.env.scene.users_r = paper_reflection_users();
    c.env.scene.users_t = paper_transmission_users();
    c.env.episode_length = 1000;
    c.episodes = 210;
    c.runs = 4;
    c.eval_every = 10;
    return c;
}

ExperimentConfig desk_preset() {
    ExperimentConfig c;
    c.env.shape = ArrayShape{4, 4, 4};
    // Nearest and farthest user of each space.
    c.env.scene.users_r = {{45, 18, 1.5}, {25, 5, 1.5}};
    c.env.scene.users_t = {{50, 22, 1.5}, {70, 35, 1.5}};
    c.env.episode_length = 200;
    c.episodes = 50;
    c.runs = 2;
    c.eval_every = 1;
    return c;
}

ExperimentConfig preset_by_name(const std::string& name) {
    if (name == "desk") return desk_preset();
    if (name == "paper") return paper_preset();
    throw ConfigError("preset", "expected desk|paper, got '" + name + "'");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    bool budget_touched = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no), "unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no), "expected key = value");
        const std::string key = (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(key, "unknown key");
        it->second(base, key, value);
        if (key.rfind("budget.", 0) == 0) budget_touched = true;
    }
    if (budget_touched) {
        base.env.budget = LinkBudget::make(base.env.budget.p, base.env.budget.noise_density_dbm_hz,
                                           base.env.budget.bandwidth);
    }
    base.validate();
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    return parse_config(in, std::move(base));
}

}  // namespace starris
