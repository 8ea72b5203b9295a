#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "starris/numerics.hpp"

namespace starris::nn {

/// Row-major real matrix; rows are batch samples.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    static Matrix from_row(std::span<const double> v);
};

enum class HeadActivation { kTanh, kIdentity };

/// Trunk of hidden blocks (linear -> layer norm -> ReLU) followed by one or
/// more linear heads reading the last hidden layer; head outputs are
/// concatenated in order.
struct NetworkSpec {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden;
    std::vector<std::size_t> heads;
    HeadActivation activation = HeadActivation::kIdentity;

    std::size_t output_dim() const;
};

inline constexpr double kLayerNormEps = 1e-10;

struct LinearSlot {
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t w = 0;  // offset of the out x in weight block
    std::size_t b = 0;  // offset of the bias vector
};

struct NormSlot {
    std::size_t dim = 0;
    std::size_t gain = 0;
    std::size_t shift = 0;
};

// Per-layer activations recorded during a forward pass.
struct Tape {
    Matrix input;
    std::vector<Matrix> block_in;    // input of each hidden block
    std::vector<Matrix> normalized;  // pre-scale layer-norm output
    std::vector<std::vector<double>> inv_std;
    std::vector<Matrix> block_out;   // post-ReLU
    std::vector<Matrix> head_out;    // post-activation
};

class Network {
public:
    Network() = default;
    explicit Network(NetworkSpec spec);

    const NetworkSpec& spec() const { return spec_; }
    std::size_t param_count() const { return params_.size(); }
    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }

    const std::vector<LinearSlot>& hidden_linear() const { return hidden_; }
    const std::vector<NormSlot>& hidden_norm() const { return norms_; }
    const std::vector<LinearSlot>& head_linear() const { return head_slots_; }

    // Weights and biases uniform in +-1/sqrt(fan_in); layer norm gain 1, shift 0.
    void initialize(RngStream& rng);

    Matrix forward(const Matrix& x, Tape* tape = nullptr) const;

    /// Reverse pass. `d_out` is dObjective/dOutput (batch x output_dim).
    /// Parameter gradients are accumulated into `grad`; returns dObjective/dInput.
    Matrix backward(const Tape& tape, const Matrix& d_out, std::span<double> grad) const;

    friend bool operator==(const Network& a, const Network& b) { return a.params_ == b.params_; }

private:
    NetworkSpec spec_;
    std::vector<LinearSlot> hidden_;
    std::vector<NormSlot> norms_;
    std::vector<LinearSlot> head_slots_;
    std::vector<double> params_;
};

// y = x W^T + b for every row of x.
void linear_forward(const Matrix& x, std::span<const double> w, std::span<const double> b, Matrix& y);

}  // namespace starris::nn
