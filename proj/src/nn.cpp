#include "starris/nn.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "starris/errors.hpp"

namespace starris::nn {

Matrix Matrix::from_row(std::span<const double> v) {
    Matrix m(1, v.size());
    std::copy(v.begin(), v.end(), m.data.begin());
    return m;
}

std::size_t NetworkSpec::output_dim() const { return std::accumulate(heads.begin(), heads.end(), std::size_t{0}); }

namespace {

LinearSlot make_linear(std::size_t in, std::size_t out, std::size_t& cursor) {
    LinearSlot s{in, out, cursor, cursor + in * out};
    cursor += in * out + out;
    return s;
}

// dW += dY^T X, db += colsum(dY), and (optionally) dX = dY W.
void linear_backward(const Matrix& x, const Matrix& dy, std::span<const double> w, std::span<double> dw,
                     std::span<double> db, Matrix* dx) {
    const std::size_t in = x.cols;
    const std::size_t out = dy.cols;
    if (dx) *dx = Matrix(x.rows, in);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const double* xr = x.data.data() + r * in;
        const double* dyr = dy.data.data() + r * out;
        double* dxr = dx ? dx->data.data() + r * in : nullptr;
        for (std::size_t o = 0; o < out; ++o) {
            const double g = dyr[o];
            if (g == 0.0) continue;
            db[o] += g;
            double* dwo = dw.data() + o * in;
            const double* wo = w.data() + o * in;
            for (std::size_t i = 0; i < in; ++i) dwo[i] += g * xr[i];
            if (dxr) {
                for (std::size_t i = 0; i < in; ++i) dxr[i] += g * wo[i];
            }
        }
    }
}

}  // namespace

void linear_forward(const Matrix& x, std::span<const double> w, std::span<const double> b, Matrix& y) {
    const std::size_t in = x.cols;
    const std::size_t out = b.size();
    y = Matrix(x.rows, out);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const double* xr = x.data.data() + r * in;
        double* yr = y.data.data() + r * out;
        for (std::size_t o = 0; o < out; ++o) {
            const double* wo = w.data() + o * in;
            double acc = b[o];
            for (std::size_t i = 0; i < in; ++i) acc += wo[i] * xr[i];
            yr[o] = acc;
        }
    }
}

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) {
    if (spec_.input_dim == 0 || spec_.heads.empty()) throw ShapeError("Network: empty input or head list");
    std::size_t cursor = 0;
    std::size_t width = spec_.input_dim;
    for (std::size_t h : spec_.hidden) {
        hidden_.push_back(make_linear(width, h, cursor));
        norms_.push_back(NormSlot{h, cursor, cursor + h});
        cursor += 2 * h;
        width = h;
    }
    for (std::size_t h : spec_.heads) head_slots_.push_back(make_linear(width, h, cursor));
    params_.assign(cursor, 0.0);
    for (const auto& n : norms_) std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(n.gain), n.dim, 1.0);
}

void Network::initialize(RngStream& rng) {
    auto fill = [&](const LinearSlot& s) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(s.in));
        for (std::size_t i = 0; i < s.in * s.out; ++i) params_[s.w + i] = rng.uniform(-bound, bound);
        for (std::size_t i = 0; i < s.out; ++i) params_[s.b + i] = rng.uniform(-bound, bound);
    };
    for (const auto& s : hidden_) fill(s);
    for (const auto& n : norms_) {
        std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(n.gain), n.dim, 1.0);
        std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(n.shift), n.dim, 0.0);
    }
    for (const auto& s : head_slots_) fill(s);
}

Matrix Network::forward(const Matrix& x, Tape* tape) const {
    if (x.cols != spec_.input_dim) {
        throw ShapeError("Network::forward: input has " + std::to_string(x.cols) + " columns, expected " +
                         std::to_string(spec_.input_dim));
    }
    const std::span<const double> p = params_;
    if (tape) {
        tape->input = x;
        tape->block_in.clear();
        tape->normalized.clear();
        tape->inv_std.clear();
        tape->block_out.clear();
        tape->head_out.clear();
    }

    Matrix cur = x;
    for (std::size_t l = 0; l < hidden_.size(); ++l) {
        const auto& lin = hidden_[l];
        const auto& nrm = norms_[l];
        Matrix z;
        linear_forward(cur, p.subspan(lin.w, lin.in * lin.out), p.subspan(lin.b, lin.out), z);
        Matrix xhat(z.rows, z.cols);
        std::vector<double> inv(z.rows);
        Matrix out(z.rows, z.cols);
        const double d = static_cast<double>(z.cols);
        for (std::size_t r = 0; r < z.rows; ++r) {
            const auto zr = z.row(r);
            double mean = 0.0;
            for (double v : zr) mean += v;
            mean /= d;
            double var = 0.0;
            for (double v : zr) var += (v - mean) * (v - mean);
            var /= d;
            inv[r] = 1.0 / std::sqrt(var + kLayerNormEps);
            for (std::size_t c = 0; c < z.cols; ++c) {
                const double nh = (zr[c] - mean) * inv[r];
                xhat(r, c) = nh;
                const double y = p[nrm.gain + c] * nh + p[nrm.shift + c];
                out(r, c) = y > 0.0 ? y : 0.0;
            }
        }
        if (tape) {
            tape->block_in.push_back(std::move(cur));
            tape->normalized.push_back(std::move(xhat));
            tape->inv_std.push_back(std::move(inv));
            tape->block_out.push_back(out);
        }
        cur = std::move(out);
    }

    Matrix result(x.rows, spec_.output_dim());
    std::size_t col = 0;
    for (const auto& head : head_slots_) {
        Matrix z;
        linear_forward(cur, p.subspan(head.w, head.in * head.out), p.subspan(head.b, head.out), z);
        if (spec_.activation == HeadActivation::kTanh) {
            for (auto& v : z.data) v = std::tanh(v);
        }
        for (std::size_t r = 0; r < z.rows; ++r)
            for (std::size_t c = 0; c < z.cols; ++c) result(r, col + c) = z(r, c);
        col += head.out;
        if (tape) tape->head_out.push_back(std::move(z));
    }
    return result;
}

Matrix Network::backward(const Tape& tape, const Matrix& d_out, std::span<double> grad) const {
    if (grad.size() != params_.size()) throw ShapeError("Network::backward: gradient buffer size mismatch");
    if (d_out.cols != spec_.output_dim() || d_out.rows != tape.input.rows) {
        throw ShapeError("Network::backward: upstream gradient shape mismatch");
    }
    const std::span<const double> p = params_;
    const std::size_t batch = d_out.rows;
    const Matrix& last = hidden_.empty() ? tape.input : tape.block_out.back();

    Matrix d_last(batch, last.cols);
    std::size_t col = 0;
    for (std::size_t h = 0; h < head_slots_.size(); ++h) {
        const auto& head = head_slots_[h];
        const Matrix& a = tape.head_out[h];
        Matrix dz(batch, head.out);
        for (std::size_t r = 0; r < batch; ++r) {
            for (std::size_t c = 0; c < head.out; ++c) {
                const double g = d_out(r, col + c);
                dz(r, c) = spec_.activation == HeadActivation::kTanh ? g * (1.0 - a(r, c) * a(r, c)) : g;
            }
        }
        Matrix dx;
        linear_backward(last, dz, p.subspan(head.w, head.in * head.out), grad.subspan(head.w, head.in * head.out),
                        grad.subspan(head.b, head.out), &dx);
        for (std::size_t i = 0; i < d_last.data.size(); ++i) d_last.data[i] += dx.data[i];
        col += head.out;
    }

    Matrix d_cur = std::move(d_last);
    for (std::size_t li = hidden_.size(); li-- > 0;) {
        const auto& lin = hidden_[li];
        const auto& nrm = norms_[li];
        const Matrix& xhat = tape.normalized[li];
        const Matrix& out = tape.block_out[li];
        const std::size_t width = lin.out;
        const double d = static_cast<double>(width);
        Matrix dz(batch, width);
        std::vector<double> dxhat(width);
        for (std::size_t r = 0; r < batch; ++r) {
            double mean_dxhat = 0.0;
            double mean_dxhat_xhat = 0.0;
            for (std::size_t c = 0; c < width; ++c) {
                const double dy = out(r, c) > 0.0 ? d_cur(r, c) : 0.0;
                grad[nrm.gain + c] += dy * xhat(r, c);
                grad[nrm.shift + c] += dy;
                dxhat[c] = dy * p[nrm.gain + c];
                mean_dxhat += dxhat[c];
                mean_dxhat_xhat += dxhat[c] * xhat(r, c);
            }
            mean_dxhat /= d;
            mean_dxhat_xhat /= d;
            const double inv = tape.inv_std[li][r];
            for (std::size_t c = 0; c < width; ++c) {
                dz(r, c) = inv * (dxhat[c] - mean_dxhat - xhat(r, c) * mean_dxhat_xhat);
            }
        }
        Matrix dx;
        linear_backward(tape.block_in[li], dz, p.subspan(lin.w, lin.in * lin.out),
                        grad.subspan(lin.w, lin.in * lin.out), grad.subspan(lin.b, lin.out), &dx);
        d_cur = std::move(dx);
    }
    return d_cur;
}

}  // namespace starris::nn
