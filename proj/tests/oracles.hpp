#pragma once

// Reference computations written straight from the system model with plain
// loops over std::complex; nothing here calls into the library's math.

#include <complex>
#include <vector>

namespace oracle {

using C = std::complex<double>;
using Vec = std::vector<C>;
using Mat = std::vector<std::vector<C>>;  // row-major rows

// g (1xN) * Theta (NxN) * G (NxM) -> 1xM
inline Vec cascade(const Vec& g, const Mat& theta, const Mat& G) {
    const std::size_t n = g.size();
    const std::size_t m = G.empty() ? 0 : G[0].size();
    Vec gt(n, C{});
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r) gt[c] += g[r] * theta[r][c];
    Vec out(m, C{});
    for (std::size_t c = 0; c < m; ++c)
        for (std::size_t r = 0; r < n; ++r) out[c] += gt[r] * G[r][c];
    return out;
}

// (v + h)^H / ||v||^2 as an M-vector.
inline Vec mrt(const Vec& v, const Vec& h) {
    double nrm = 0;
    for (const C& x : v) nrm += std::norm(x);
    Vec w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::conj(v[i] + h[i]) / nrm;
    return w;
}

inline C dot(const Vec& row, const Vec& col) {
    C s{};
    for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * col[i];
    return s;
}

// SINR of user k in one space: p|g_k Th_k G w_k + h_k w_k|^2 / (sum_{j!=k} p|g_j Th_j G w_k|^2 + s2).
inline double sinr(std::size_t k, const std::vector<Vec>& g, const std::vector<Mat>& theta, const Mat& G,
                   const std::vector<Vec>& h, const std::vector<Vec>& w, double p, double s2) {
    const Vec ck = cascade(g[k], theta[k], G);
    const C sig = dot(ck, w[k]) + dot(h[k], w[k]);
    double interf = 0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (j == k) continue;
        interf += p * std::norm(dot(cascade(g[j], theta[j], G), w[k]));
    }
    return p * std::norm(sig) / (interf + s2);
}

// diag(a_n * beta_n * e^{j theta_n})
inline Mat theta_matrix(const std::vector<int>& a_row, const std::vector<int>& beta, const std::vector<double>& th) {
    const std::size_t n = th.size();
    Mat m(n, Vec(n, C{}));
    for (std::size_t i = 0; i < n; ++i)
        if (a_row[i] && beta[i]) m[i][i] = std::polar(1.0, th[i]);
    return m;
}

}  // namespace oracle
