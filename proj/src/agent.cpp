#include "starris/agent.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "starris/errors.hpp"

namespace starris {

void AgentHyperparams::validate() const {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("agent.eta", "discount must lie in [0, 1]");
    if (!(eta_a > 0.0)) throw ConfigError("agent.eta_a", "must be positive");
    if (!(eta_c > 0.0)) throw ConfigError("agent.eta_c", "must be positive");
    if (!(lambda_soft > 0.0 && lambda_soft < 1.0)) throw ConfigError("agent.lambda", "must lie in (0, 1)");
    if (batch == 0) throw ConfigError("agent.batch", "must be at least 1");
    if (buffer_capacity < batch) throw ConfigError("agent.buffer", "must hold at least one batch");
    if (hidden_width == 0) throw ConfigError("agent.width", "must be positive");
    if (sigma_start < 0.0 || sigma_end < 0.0) throw ConfigError("agent.sigma", "must be non-negative");
    if (!(sigma_decay_fraction > 0.0 && sigma_decay_fraction <= 1.0)) {
        throw ConfigError("agent.sigma_decay_fraction", "must lie in (0, 1]");
    }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw DomainError("ReplayBuffer: capacity must be positive");
    records_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Experience e) {
    if (records_.size() < capacity_) {
        records_.push_back(std::move(e));
        return;
    }
    records_[next_] = std::move(e);
    next_ = (next_ + 1) % capacity_;
}

const Experience& ReplayBuffer::at(std::size_t i) const {
    if (i >= records_.size()) throw DomainError("ReplayBuffer::at: index out of range");
    return records_[(next_ + i) % records_.size()];
}

std::optional<std::vector<const Experience*>> ReplayBuffer::sample(RngStream& rng, std::size_t n) const {
    if (n == 0 || records_.size() < n) return std::nullopt;
    std::vector<std::size_t> idx(records_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<const Experience*> out;
    out.reserve(n);
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + rng.uniform_index(idx.size() - i);
        std::swap(idx[i], idx[j]);
        out.push_back(&records_[idx[i]]);
    }
    return out;
}

nn::Network make_actor(std::size_t state_dim, std::size_t elements, std::size_t layers, std::size_t width) {
    nn::NetworkSpec spec;
    spec.input_dim = state_dim;
    spec.hidden.assign(layers, width);
    spec.heads = {elements, elements};
    spec.activation = nn::HeadActivation::kTanh;
    return nn::Network(spec);
}

nn::Network make_critic(std::size_t state_dim, std::size_t action_dim, std::size_t layers, std::size_t width) {
    nn::NetworkSpec spec;
    spec.input_dim = state_dim + action_dim;
    spec.hidden.assign(layers, width);
    spec.heads = {1};
    spec.activation = nn::HeadActivation::kIdentity;
    return nn::Network(spec);
}

Action actor_forward(const nn::Network& actor, std::span<const double> state) {
    return actor.forward(nn::Matrix::from_row(state)).data;
}

double critic_forward(const nn::Network& critic, std::span<const double> state, std::span<const double> action) {
    std::vector<double> in(state.begin(), state.end());
    in.insert(in.end(), action.begin(), action.end());
    return critic.forward(nn::Matrix::from_row(in)).data[0];
}

double target_return(double reward, std::span<const double> next_state, const nn::Network& target_actor,
                     const nn::Network& target_critic, double eta) {
    if (eta == 0.0) return reward;
    const Action a = actor_forward(target_actor, next_state);
    return reward + eta * critic_forward(target_critic, next_state, a);
}

double critic_loss(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.empty()) throw DomainError("critic_loss: empty batch");
    if (predictions.size() != targets.size()) throw ShapeError("critic_loss: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = targets[i] - predictions[i];
        s += e * e;
    }
    return s / static_cast<double>(predictions.size());
}

nn::Matrix stack_rows(std::span<const std::vector<double>> rows) {
    if (rows.empty()) return {};
    nn::Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols) throw ShapeError("stack_rows: ragged rows");
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
}

nn::Matrix concat_columns(const nn::Matrix& a, const nn::Matrix& b) {
    if (a.rows != b.rows) throw ShapeError("concat_columns: row mismatch");
    nn::Matrix m(a.rows, a.cols + b.cols);
    for (std::size_t r = 0; r < a.rows; ++r) {
        std::copy(a.row(r).begin(), a.row(r).end(), m.row(r).begin());
        std::copy(b.row(r).begin(), b.row(r).end(), m.row(r).begin() + static_cast<std::ptrdiff_t>(a.cols));
    }
    return m;
}

std::vector<double> critic_gradient(const nn::Network& critic, const nn::Matrix& states, const nn::Matrix& actions,
                                    std::span<const double> targets) {
    const std::size_t batch = states.rows;
    if (batch == 0) throw DomainError("critic_gradient: empty batch");
    if (targets.size() != batch) throw ShapeError("critic_gradient: target count mismatch");
    nn::Tape tape;
    const nn::Matrix q = critic.forward(concat_columns(states, actions), &tape);
    nn::Matrix d(batch, 1);
    for (std::size_t i = 0; i < batch; ++i) d(i, 0) = -2.0 * (targets[i] - q(i, 0)) / static_cast<double>(batch);
    std::vector<double> grad(critic.param_count(), 0.0);
    critic.backward(tape, d, grad);
    return grad;
}

std::vector<double> actor_gradient(const nn::Network& actor, const nn::Network& critic, const nn::Matrix& states) {
    const std::size_t batch = states.rows;
    if (batch == 0) throw DomainError("actor_gradient: empty batch");
    nn::Tape actor_tape;
    const nn::Matrix actions = actor.forward(states, &actor_tape);
    nn::Tape critic_tape;
    critic.forward(concat_columns(states, actions), &critic_tape);
    nn::Matrix d_q(batch, 1, 1.0 / static_cast<double>(batch));
    std::vector<double> critic_scratch(critic.param_count(), 0.0);
    const nn::Matrix d_in = critic.backward(critic_tape, d_q, critic_scratch);

    nn::Matrix d_action(batch, actions.cols);
    for (std::size_t r = 0; r < batch; ++r)
        for (std::size_t c = 0; c < actions.cols; ++c) d_action(r, c) = d_in(r, states.cols + c);
    std::vector<double> grad(actor.param_count(), 0.0);
    actor.backward(actor_tape, d_action, grad);
    return grad;
}

double update_critic(nn::Network& critic, const nn::Matrix& states, const nn::Matrix& actions,
                     std::span<const double> targets, double eta_c) {
    const nn::Matrix q = critic.forward(concat_columns(states, actions));
    const double loss = critic_loss(q.data, targets);
    if (eta_c == 0.0) return loss;
    const auto grad = critic_gradient(critic, states, actions, targets);
    auto p = critic.params();
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= eta_c * grad[i];
    return loss;
}

void update_actor(nn::Network& actor, const nn::Network& critic, const nn::Matrix& states, double eta_a) {
    if (eta_a == 0.0) return;
    const auto grad = actor_gradient(actor, critic, states);
    auto p = actor.params();
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += eta_a * grad[i];
}

void soft_update(nn::Network& target, const nn::Network& online, double lambda) {
    if (target.param_count() != online.param_count()) throw ShapeError("soft_update: parameter count mismatch");
    auto t = target.params();
    const auto o = online.params();
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = lambda * o[i] + (1.0 - lambda) * t[i];
}

Action explore(std::span<const double> action, double sigma, RngStream& rng) {
    Action out(action.begin(), action.end());
    if (sigma == 0.0) return out;
    for (auto& a : out) a = std::clamp(a + sigma * rng.normal(), -1.0, 1.0);
    return out;
}

double exploration_sigma(std::size_t step, std::size_t total_steps, const AgentHyperparams& hp) {
    const double horizon = hp.sigma_decay_fraction * static_cast<double>(total_steps);
    if (horizon <= 0.0) return hp.sigma_end;
    const double f = std::min(1.0, static_cast<double>(step) / horizon);
    return hp.sigma_start + f * (hp.sigma_end - hp.sigma_start);
}

std::uint64_t flops_estimate(std::uint64_t n, std::uint64_t t) {
    const std::uint64_t feature_extractor = 2 * ((6 + 2 * n) * t + t * t);
    const std::uint64_t heads = 2 * (2 * t * n);
    return feature_extractor + heads;
}

DdpgAgent::DdpgAgent(std::size_t state_dim, std::size_t elements, AgentHyperparams hp, std::uint64_t seed)
    : hp_(hp),
      actor_(make_actor(state_dim, elements, hp.hidden_layers, hp.hidden_width)),
      critic_(make_critic(state_dim, 2 * elements, hp.hidden_layers, hp.hidden_width)),
      buffer_(hp.buffer_capacity),
      rng_(mix_seed(seed)) {
    hp_.validate();
    actor_.initialize(rng_);
    critic_.initialize(rng_);
    target_actor_ = actor_;
    target_critic_ = critic_;
}

Action DdpgAgent::act(std::span<const double> state) const { return actor_forward(actor_, state); }

Action DdpgAgent::act_noisy(std::span<const double> state, double sigma) {
    return explore(act(state), sigma, rng_);
}

void DdpgAgent::remember(Experience e) { buffer_.push(std::move(e)); }

std::optional<TrainStats> DdpgAgent::train_step() {
    auto batch = buffer_.sample(rng_, hp_.batch);
    if (!batch) return std::nullopt;
    const std::size_t n = batch->size();
    const std::size_t sdim = (*batch)[0]->state.size();
    const std::size_t adim = (*batch)[0]->action.size();
    nn::Matrix states(n, sdim), actions(n, adim), next_states(n, sdim);
    for (std::size_t i = 0; i < n; ++i) {
        const Experience& e = *(*batch)[i];
        std::copy(e.state.begin(), e.state.end(), states.row(i).begin());
        std::copy(e.action.begin(), e.action.end(), actions.row(i).begin());
        std::copy(e.next_state.begin(), e.next_state.end(), next_states.row(i).begin());
    }

    // Targets from the target networks; episodes never terminate, so always bootstrap.
    const nn::Matrix next_actions = target_actor_.forward(next_states);
    const nn::Matrix next_q = target_critic_.forward(concat_columns(next_states, next_actions));
    std::vector<double> targets(n);
    for (std::size_t i = 0; i < n; ++i) targets[i] = (*batch)[i]->reward + hp_.eta * next_q(i, 0);

    TrainStats stats;
    stats.critic_loss = update_critic(critic_, states, actions, targets, hp_.eta_c);
    update_actor(actor_, critic_, states, hp_.eta_a);
    soft_update(target_actor_, actor_, hp_.lambda_soft);
    soft_update(target_critic_, critic_, hp_.lambda_soft);
    return stats;
}

namespace {

constexpr const char* kCheckpointMagic = "starris-checkpoint";
constexpr int kCheckpointVersion = 1;

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s.empty() ? "-" : s;
}

std::vector<std::size_t> split_sizes(const std::string& s) {
    std::vector<std::size_t> out;
    if (s == "-") return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
    return out;
}

void expect_token(std::istream& in, const std::string& want) {
    std::string tok;
    if (!(in >> tok) || tok != want) throw IoError("checkpoint: expected '" + want + "', got '" + tok + "'");
}

}  // namespace

void write_network(std::ostream& out, const std::string& name, const nn::Network& net) {
    const auto& spec = net.spec();
    out << "network " << name << '\n';
    out << "input " << spec.input_dim << '\n';
    out << "hidden " << join_sizes(spec.hidden) << '\n';
    out << "heads " << join_sizes(spec.heads) << '\n';
    out << "activation " << (spec.activation == nn::HeadActivation::kTanh ? "tanh" : "identity") << '\n';
    out << "params " << net.param_count() << '\n';
    char buf[64];
    std::size_t col = 0;
    for (double v : net.params()) {
        std::snprintf(buf, sizeof buf, "%a", v);
        out << buf << (++col % 8 == 0 ? '\n' : ' ');
    }
    if (col % 8 != 0) out << '\n';
}

nn::Network read_network(std::istream& in, const std::string& name) {
    expect_token(in, "network");
    expect_token(in, name);
    nn::NetworkSpec spec;
    std::string tok;
    expect_token(in, "input");
    in >> spec.input_dim;
    expect_token(in, "hidden");
    in >> tok;
    spec.hidden = split_sizes(tok);
    expect_token(in, "heads");
    in >> tok;
    spec.heads = split_sizes(tok);
    expect_token(in, "activation");
    in >> tok;
    if (tok == "tanh") {
        spec.activation = nn::HeadActivation::kTanh;
    } else if (tok == "identity") {
        spec.activation = nn::HeadActivation::kIdentity;
    } else {
        throw IoError("checkpoint: unknown activation '" + tok + "'");
    }
    expect_token(in, "params");
    std::size_t count = 0;
    in >> count;
    nn::Network net(spec);
    if (count != net.param_count()) throw IoError("checkpoint: parameter count does not match the shape header");
    for (auto& v : net.params()) {
        if (!(in >> tok)) throw IoError("checkpoint: truncated parameter block for " + name);
        v = std::strtod(tok.c_str(), nullptr);
    }
    return net;
}

void DdpgAgent::save(std::ostream& out) const {
    out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
    write_network(out, "actor", actor_);
    write_network(out, "critic", critic_);
    write_network(out, "target_actor", target_actor_);
    write_network(out, "target_critic", target_critic_);
    if (!out) throw IoError("checkpoint: write failed");
}

void DdpgAgent::load(std::istream& in) {
    expect_token(in, kCheckpointMagic);
    int version = 0;
    in >> version;
    if (version != kCheckpointVersion) throw IoError("checkpoint: unsupported version " + std::to_string(version));
    nn::Network actor = read_network(in, "actor");
    nn::Network critic = read_network(in, "critic");
    nn::Network target_actor = read_network(in, "target_actor");
    nn::Network target_critic = read_network(in, "target_critic");
    if (actor.param_count() != actor_.param_count() || critic.param_count() != critic_.param_count()) {
        throw IoError("checkpoint: network shapes do not match this agent");
    }
    actor_ = std::move(actor);
    critic_ = std::move(critic);
    target_actor_ = std::move(target_actor);
    target_critic_ = std::move(target_critic);
}

}  // namespace starris
