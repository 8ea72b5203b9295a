#include "starris/star_ris.hpp"

#include <cmath>
#include <string>

#include "starris/errors.hpp"

namespace starris {

AssignmentMatrix::AssignmentMatrix(std::size_t k, std::size_t l, std::size_t n)
    : k_(k), l_(l), n_(n), bits_((k + l) * n, 0) {}

std::size_t AssignmentMatrix::row_sum(std::size_t user) const {
    std::size_t s = 0;
    for (std::size_t e = 0; e < n_; ++e) s += bits_[user * n_ + e];
    return s;
}

std::size_t AssignmentMatrix::column_sum(std::size_t element) const {
    std::size_t s = 0;
    for (std::size_t u = 0; u < users(); ++u) s += bits_[u * n_ + element];
    return s;
}

int AssignmentMatrix::owner(std::size_t element) const {
    for (std::size_t u = 0; u < users(); ++u) {
        if (bits_[u * n_ + element]) return static_cast<int>(u);
    }
    return -1;
}

void AssignmentMatrix::assign(std::size_t element, int user) {
    for (std::size_t u = 0; u < users(); ++u) bits_[u * n_ + element] = 0;
    if (user >= 0) bits_[static_cast<std::size_t>(user) * n_ + element] = 1;
}

bool AssignmentMatrix::columns_exclusive() const {
    for (std::size_t e = 0; e < n_; ++e) {
        if (column_sum(e) > 1) return false;
    }
    return true;
}

bool AssignmentMatrix::rows_covered() const {
    for (std::size_t u = 0; u < users(); ++u) {
        if (row_sum(u) == 0) return false;
    }
    return true;
}

double wrap_phase(double theta) {
    constexpr double kTwoPi = 2.0 * kPi;
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    // fmod of a tiny negative value can round up to exactly 2pi.
    if (r >= kTwoPi) r = 0.0;
    return r;
}

std::size_t ModeVector::transmitting() const {
    std::size_t s = 0;
    for (auto b : beta_t) s += b;
    return s;
}

std::size_t ModeVector::reflecting() const {
    std::size_t s = 0;
    for (auto b : beta_r) s += b;
    return s;
}

ModeVector modes_from_assignment(const AssignmentMatrix& a) {
    const std::size_t n = a.elements();
    ModeVector modes{std::vector<std::uint8_t>(n, 0), std::vector<std::uint8_t>(n, 0)};
    for (std::size_t e = 0; e < n; ++e) {
        const std::size_t s = a.column_sum(e);
        if (s > 1) {
            throw ConstraintError("modes_from_assignment: element " + std::to_string(e) + " assigned to " +
                                  std::to_string(s) + " users");
        }
        const int u = a.owner(e);
        if (u < 0) continue;
        if (a.is_reflection_row(static_cast<std::size_t>(u))) {
            modes.beta_r[e] = 1;
        } else {
            modes.beta_t[e] = 1;
        }
    }
    return modes;
}

ComplexMatrix effective_coefficients(std::span<const std::uint8_t> a_row, std::span<const std::uint8_t> beta,
                                     const PhaseConfig& theta) {
    const std::size_t n = a_row.size();
    if (beta.size() != n || theta.theta.size() != n) {
        throw ShapeError("effective_coefficients: length mismatch");
    }
    ComplexMatrix s(1, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (a_row[i] && beta[i]) s[i] = std::polar(1.0, theta.theta[i]);
    }
    return s;
}

ComplexMatrix effective_matrix(const ComplexMatrix& s) { return diag_from_vector(s); }

std::vector<ComplexMatrix> user_coefficients(const AssignmentMatrix& a, const PhaseConfig& theta) {
    const ModeVector modes = modes_from_assignment(a);
    const std::size_t n = a.elements();
    std::vector<ComplexMatrix> out;
    out.reserve(a.users());
    std::vector<std::uint8_t> row(n);
    for (std::size_t u = 0; u < a.users(); ++u) {
        for (std::size_t e = 0; e < n; ++e) row[e] = a(u, e) ? 1 : 0;
        const auto& beta = a.is_reflection_row(u) ? modes.beta_r : modes.beta_t;
        out.push_back(effective_coefficients(row, beta, theta));
    }
    return out;
}

std::size_t active_element_count(const AssignmentMatrix& a) {
    std::size_t s = 0;
    for (std::size_t u = 0; u < a.users(); ++u) s += a.row_sum(u);
    return s;
}

AssignmentMatrix equal_partition_assignment(std::size_t n, std::size_t k, std::size_t l) {
    const std::size_t users = k + l;
    if (users == 0 || n % users != 0) {
        throw DomainError("equal_partition_assignment: " + std::to_string(n) + " elements do not split evenly over " +
                          std::to_string(users) + " users");
    }
    return block_partition_assignment(n, k, l);
}

AssignmentMatrix block_partition_assignment(std::size_t n, std::size_t k, std::size_t l) {
    const std::size_t users = k + l;
    if (users == 0 || users > n) throw DomainError("block_partition_assignment: need 1 <= K+L <= N");
    AssignmentMatrix a(k, l, n);
    const std::size_t base = n / users;
    const std::size_t extra = n % users;
    std::size_t e = 0;
    for (std::size_t u = 0; u < users; ++u) {
        const std::size_t len = base + (u < extra ? 1 : 0);
        for (std::size_t i = 0; i < len; ++i) a.set(u, e++, true);
    }
    return a;
}

}  // namespace starris
