#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace starris {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 2.998e8;  // m/s

/// Dense complex matrix, row-major. Vectors are 1xN or Nx1 matrices.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols, cplx fill = {});
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix row_vector(std::span<const cplx> values);
    static ComplexMatrix column_vector(std::span<const cplx> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool is_vector() const noexcept { return rows_ == 1 || cols_ == 1; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    // Flat access; for vectors this is the element index.
    cplx& operator[](std::size_t i) { return data_[i]; }
    const cplx& operator[](std::size_t i) const { return data_[i]; }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }
    std::span<const cplx> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(cplx s);

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix hermitian(const ComplexMatrix& a);

// Sum of squared magnitudes; input must be a row or column vector.
double euclid_norm_sq(const ComplexMatrix& v);

// N x N matrix with v on the diagonal.
ComplexMatrix diag_from_vector(const ComplexMatrix& v);

/// Seeded random stream. The engine is std::mt19937_64, whose output sequence
/// is fixed by the standard; the uniform and Gaussian transforms are done here
/// rather than with <random> distributions, which are implementation-defined.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Uniform integer on [0, n).
    std::size_t uniform_index(std::size_t n);
    double normal();
    // CN(0,1): real and imaginary parts each N(0, 1/2).
    cplx complex_normal();

    // Independent child stream; derived deterministically from this one.
    RngStream split();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

ComplexMatrix sample_standard_complex_gaussian(RngStream& rng, std::size_t rows, std::size_t cols);

// SplitMix64 finalizer; used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace starris
