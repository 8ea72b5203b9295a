#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "starris/nn.hpp"
#include "starris/numerics.hpp"

namespace starris {

using State = std::vector<double>;
using Action = std::vector<double>;

struct AgentHyperparams {
    double eta = 0.6;            // discount
    double eta_a = 1e-4;         // actor step size
    double eta_c = 1e-3;         // critic step size
    double lambda_soft = 0.005;  // Polyak factor
    std::size_t batch = 64;
    std::size_t buffer_capacity = 10000;
    std::size_t hidden_layers = 2;
    std::size_t hidden_width = 128;
    double sigma_start = 0.5;
    double sigma_end = 0.05;
    double sigma_decay_fraction = 0.5;  // share of training over which sigma decays

    void validate() const;
};

struct Experience {
    State state;
    Action action;
    double reward = 0.0;
    State next_state;
};

/// Fixed-capacity FIFO ring of transitions.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return records_.size(); }
    void push(Experience e);
    // i = 0 is the oldest stored record.
    const Experience& at(std::size_t i) const;
    // n distinct records drawn uniformly; nullopt while fewer than n are stored.
    std::optional<std::vector<const Experience*>> sample(RngStream& rng, std::size_t n) const;

private:
    std::size_t capacity_;
    std::size_t next_ = 0;  // slot overwritten by the next push once full
    std::vector<Experience> records_;
};

// Actor: hidden blocks over the state, then a phase head and an assignment head (tanh).
nn::Network make_actor(std::size_t state_dim, std::size_t elements, std::size_t layers, std::size_t width);
// Critic: hidden blocks over [state, action], scalar linear output.
nn::Network make_critic(std::size_t state_dim, std::size_t action_dim, std::size_t layers, std::size_t width);

Action actor_forward(const nn::Network& actor, std::span<const double> state);
double critic_forward(const nn::Network& critic, std::span<const double> state, std::span<const double> action);

// r + eta * Q'(s', pi'(s')).
double target_return(double reward, std::span<const double> next_state, const nn::Network& target_actor,
                     const nn::Network& target_critic, double eta);

// Mean squared Bellman error.
double critic_loss(std::span<const double> predictions, std::span<const double> targets);

nn::Matrix stack_rows(std::span<const std::vector<double>> rows);
nn::Matrix concat_columns(const nn::Matrix& a, const nn::Matrix& b);

// Gradient of the critic loss with respect to every critic parameter.
std::vector<double> critic_gradient(const nn::Network& critic, const nn::Matrix& states, const nn::Matrix& actions,
                                    std::span<const double> targets);

// Gradient of mean_i Q(s_i, pi(s_i)) with respect to every actor parameter.
std::vector<double> actor_gradient(const nn::Network& actor, const nn::Network& critic, const nn::Matrix& states);

// One descent step on the critic loss; returns the loss before the step.
double update_critic(nn::Network& critic, const nn::Matrix& states, const nn::Matrix& actions,
                     std::span<const double> targets, double eta_c);

// One deterministic policy-gradient ascent step; the critic is left untouched.
void update_actor(nn::Network& actor, const nn::Network& critic, const nn::Matrix& states, double eta_a);

// target <- lambda * online + (1 - lambda) * target.
void soft_update(nn::Network& target, const nn::Network& online, double lambda);

// Adds N(0, sigma^2) noise per entry and clips to [-1, 1].
Action explore(std::span<const double> action, double sigma, RngStream& rng);

double exploration_sigma(std::size_t step, std::size_t total_steps, const AgentHyperparams& hp);

// Multiply-add count of the two-layer feature extractor plus both heads for
// six users, width T.
std::uint64_t flops_estimate(std::uint64_t n, std::uint64_t t);

struct TrainStats {
    double critic_loss = 0.0;
};

class DdpgAgent {
public:
    DdpgAgent(std::size_t state_dim, std::size_t elements, AgentHyperparams hp, std::uint64_t seed);

    const AgentHyperparams& hyperparams() const { return hp_; }
    const nn::Network& actor() const { return actor_; }
    const nn::Network& critic() const { return critic_; }
    const nn::Network& target_actor() const { return target_actor_; }
    const nn::Network& target_critic() const { return target_critic_; }
    const ReplayBuffer& buffer() const { return buffer_; }

    Action act(std::span<const double> state) const;
    Action act_noisy(std::span<const double> state, double sigma);
    void remember(Experience e);

    // Sample a batch and apply one critic step, one actor step and the soft
    // target updates. Returns nullopt while the buffer is smaller than a batch.
    std::optional<TrainStats> train_step();

    void save(std::ostream& out) const;
    void load(std::istream& in);

private:
    AgentHyperparams hp_;
    nn::Network actor_;
    nn::Network critic_;
    nn::Network target_actor_;
    nn::Network target_critic_;
    ReplayBuffer buffer_;
    RngStream rng_;
};

// Versioned text dump of one network: spec header then hex-float parameters.
void write_network(std::ostream& out, const std::string& name, const nn::Network& net);
nn::Network read_network(std::istream& in, const std::string& name);

}  // namespace starris
