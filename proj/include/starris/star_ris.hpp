#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "starris/numerics.hpp"

namespace starris {

/// Binary (K+L) x N element-to-user assignment. Rows 0..K-1 are reflection
/// users, rows K..K+L-1 transmission users. An all-zero column is a shut-down
/// element.
class AssignmentMatrix {
public:
    AssignmentMatrix() = default;
    AssignmentMatrix(std::size_t k, std::size_t l, std::size_t n);

    std::size_t reflection_users() const noexcept { return k_; }
    std::size_t transmission_users() const noexcept { return l_; }
    std::size_t users() const noexcept { return k_ + l_; }
    std::size_t elements() const noexcept { return n_; }

    bool operator()(std::size_t user, std::size_t element) const { return bits_[user * n_ + element] != 0; }
    void set(std::size_t user, std::size_t element, bool on) { bits_[user * n_ + element] = on ? 1 : 0; }

    std::size_t row_sum(std::size_t user) const;
    std::size_t column_sum(std::size_t element) const;

    // User owning `element`, or -1 when it is shut down. Assumes column sums <= 1.
    int owner(std::size_t element) const;
    // Moves `element` to `user`, clearing any previous owner.
    void assign(std::size_t element, int user);

    bool columns_exclusive() const;
    bool rows_covered() const;
    bool is_reflection_row(std::size_t user) const { return user < k_; }

    friend bool operator==(const AssignmentMatrix&, const AssignmentMatrix&) = default;

private:
    std::size_t k_ = 0;
    std::size_t l_ = 0;
    std::size_t n_ = 0;
    std::vector<std::uint8_t> bits_;
};

// One phase per element, each in [0, 2pi).
struct PhaseConfig {
    std::vector<double> theta;
};

double wrap_phase(double theta);

struct ModeVector {
    std::vector<std::uint8_t> beta_t;
    std::vector<std::uint8_t> beta_r;

    std::size_t transmitting() const;
    std::size_t reflecting() const;
};

ModeVector modes_from_assignment(const AssignmentMatrix& a);

// Entry n = a_row[n] * sqrt(beta[n]) * exp(j theta[n]).
ComplexMatrix effective_coefficients(std::span<const std::uint8_t> a_row, std::span<const std::uint8_t> beta,
                                     const PhaseConfig& theta);

// diag(s) as an N x N matrix.
ComplexMatrix effective_matrix(const ComplexMatrix& s);

// Per-user coefficient vectors (1 x N) in assignment row order.
std::vector<ComplexMatrix> user_coefficients(const AssignmentMatrix& a, const PhaseConfig& theta);

std::size_t active_element_count(const AssignmentMatrix& a);

AssignmentMatrix equal_partition_assignment(std::size_t n, std::size_t k, std::size_t l);

// Contiguous blocks in row order; when N does not divide evenly the first
// N mod (K+L) users get one extra element.
AssignmentMatrix block_partition_assignment(std::size_t n, std::size_t k, std::size_t l);

}  // namespace starris
