#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dras/matrix.hpp"
#include "dras/rng.hpp"

namespace dras {

// Five-layer network: input [rows, 2] -> 1x2 shared convolution filter ->
// two fully-connected layers -> output head. The policy head is a masked
// softmax over `out` entries; the q head is a single linear scalar.

enum class HeadKind : std::uint32_t { policy = 0, q = 1 };

struct NetworkParams {
    HeadKind head = HeadKind::policy;
    std::size_t conv_rows = 0; // input rows, also fc1 input extent
    std::size_t h1 = 0;
    std::size_t h2 = 0;
    std::size_t out = 0;
    double leaky_slope = 0.01;

    std::array<double, 2> conv_w{};
    double conv_b = 0.0;
    Matrix fc1_w; // [conv_rows, h1]
    std::vector<double> fc1_b;
    Matrix fc2_w; // [h1, h2]
    std::vector<double> fc2_b;
    Matrix out_w; // [h2, out]
    std::vector<double> out_b;

    // bumped on every in-place parameter change; guards stale backward caches
    std::uint64_t revision = 0;

    void allocate() {
        fc1_w = Matrix(conv_rows, h1);
        fc1_b.assign(h1, 0.0);
        fc2_w = Matrix(h1, h2);
        fc2_b.assign(h2, 0.0);
        out_w = Matrix(h2, out);
        out_b.assign(out, 0.0);
    }
};

inline NetworkParams make_network(HeadKind head, std::size_t conv_rows, std::size_t h1, std::size_t h2,
                                  std::size_t out, double leaky_slope = 0.01) {
    if (head == HeadKind::q && out != 1)
        throw std::invalid_argument("q head requires a single output");
    NetworkParams p;
    p.head = head;
    p.conv_rows = conv_rows;
    p.h1 = h1;
    p.h2 = h2;
    p.out = out;
    p.leaky_slope = leaky_slope;
    p.allocate();
    return p;
}

// Glorot-uniform weights, zero biases.
inline void init_weights(NetworkParams& p, Rng& rng) {
    auto glorot = [&](std::span<double> w, std::size_t fan_in, std::size_t fan_out) {
        double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (double& x : w)
            x = rng.uniform(-bound, bound);
    };
    glorot(std::span<double>(p.conv_w.data(), 2), 2, 1);
    p.conv_b = 0.0;
    glorot(p.fc1_w.data, p.conv_rows, p.h1);
    glorot(p.fc2_w.data, p.h1, p.h2);
    glorot(p.out_w.data, p.h2, p.out);
    ++p.revision;
}

inline std::size_t count_parameters(const NetworkParams& p) {
    return 3 + p.conv_rows * p.h1 + p.h1 + p.h1 * p.h2 + p.h2 + p.h2 * p.out + p.out;
}

// All trainable blocks in declaration order; shared by Adam, serialization and
// the gradient checker.
template <typename Params, typename Fn>
void for_each_block(Params& p, Fn&& fn) {
    fn(std::span(p.conv_w.data(), 2));
    fn(std::span(&p.conv_b, 1));
    fn(std::span(p.fc1_w.data.data(), p.fc1_w.data.size()));
    fn(std::span(p.fc1_b.data(), p.fc1_b.size()));
    fn(std::span(p.fc2_w.data.data(), p.fc2_w.data.size()));
    fn(std::span(p.fc2_b.data(), p.fc2_b.size()));
    fn(std::span(p.out_w.data.data(), p.out_w.data.size()));
    fn(std::span(p.out_b.data(), p.out_b.size()));
}

inline NetworkParams zeros_like(const NetworkParams& p) {
    NetworkParams z = p;
    z.conv_w = {0.0, 0.0};
    z.conv_b = 0.0;
    z.fc1_w.fill(0.0);
    std::fill(z.fc1_b.begin(), z.fc1_b.end(), 0.0);
    z.fc2_w.fill(0.0);
    std::fill(z.fc2_b.begin(), z.fc2_b.end(), 0.0);
    z.out_w.fill(0.0);
    std::fill(z.out_b.begin(), z.out_b.end(), 0.0);
    return z;
}

struct ForwardCache {
    Matrix input;
    std::vector<std::uint8_t> valid_mask; // policy head only
    std::vector<double> conv_pre, conv_out;
    std::vector<double> fc1_pre, fc1_out;
    std::vector<double> fc2_pre, fc2_out;
    std::vector<double> logits;
    std::vector<double> probs; // policy head only
    std::uint64_t params_revision = 0;
};

namespace detail {

inline double leaky(double z, double slope) { return z > 0.0 ? z : slope * z; }
inline double leaky_grad(double z, double slope) { return z > 0.0 ? 1.0 : slope; }

inline void check_finite(const std::vector<double>& v, const char* where) {
    for (double x : v)
        if (!std::isfinite(x))
            throw std::runtime_error(std::string("numeric error: non-finite value in ") + where);
}

// y[j] += sum_i x[i] * W[i][j], W row-major [in, out]
inline void matvec_accumulate(const Matrix& w, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < w.rows; ++i) {
        double xi = x[i];
        if (xi == 0.0)
            continue;
        const double* row = &w.data[i * w.cols];
        for (std::size_t j = 0; j < w.cols; ++j)
            y[j] += xi * row[j];
    }
}

// dx[i] = sum_j W[i][j] * dy[j]
inline void matvec_transpose(const Matrix& w, const std::vector<double>& dy, std::vector<double>& dx) {
    for (std::size_t i = 0; i < w.rows; ++i) {
        const double* row = &w.data[i * w.cols];
        double acc = 0.0;
        for (std::size_t j = 0; j < w.cols; ++j)
            acc += row[j] * dy[j];
        dx[i] = acc;
    }
}

// dW[i][j] += x[i] * dy[j]
inline void outer_accumulate(Matrix& dw, const std::vector<double>& x, const std::vector<double>& dy) {
    for (std::size_t i = 0; i < dw.rows; ++i) {
        double xi = x[i];
        if (xi == 0.0)
            continue;
        double* row = &dw.data[i * dw.cols];
        for (std::size_t j = 0; j < dw.cols; ++j)
            row[j] += xi * dy[j];
    }
}

} // namespace detail

// Softmax over valid entries with max-subtraction; invalid entries get
// probability exactly 0.
inline std::vector<double> masked_softmax(const std::vector<double>& logits,
                                          const std::vector<std::uint8_t>& valid) {
    std::vector<double> probs(logits.size(), 0.0);
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (valid[i] && logits[i] > max_logit)
            max_logit = logits[i];
    if (!std::isfinite(max_logit))
        return probs; // no valid entry
    double denom = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (valid[i])
            denom += std::exp(logits[i] - max_logit);
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (valid[i])
            probs[i] = std::exp(logits[i] - max_logit) / denom;
    return probs;
}

// Runs the network. For the policy head `output` holds the masked softmax
// distribution; for the q head a single linear value.
inline ForwardCache forward(const NetworkParams& p, const Matrix& input,
                            const std::vector<std::uint8_t>& valid_mask = {}) {
    if (input.cols != 2)
        throw std::invalid_argument("shape error: input must have 2 columns");
    if (input.rows != p.conv_rows)
        throw std::invalid_argument("shape error: input rows " + std::to_string(input.rows) +
                                    " != network rows " + std::to_string(p.conv_rows));
    if (p.head == HeadKind::policy && valid_mask.size() != p.out)
        throw std::invalid_argument("shape error: valid_mask length must equal output size");

    ForwardCache c;
    c.input = input;
    c.valid_mask = valid_mask;
    c.params_revision = p.revision;

    c.conv_pre.resize(p.conv_rows);
    c.conv_out.resize(p.conv_rows);
    for (std::size_t r = 0; r < p.conv_rows; ++r) {
        double z = p.conv_w[0] * input(r, 0) + p.conv_w[1] * input(r, 1) + p.conv_b;
        c.conv_pre[r] = z;
        c.conv_out[r] = detail::leaky(z, p.leaky_slope);
    }

    c.fc1_pre.assign(p.h1, 0.0);
    detail::matvec_accumulate(p.fc1_w, c.conv_out, c.fc1_pre);
    for (std::size_t j = 0; j < p.h1; ++j)
        c.fc1_pre[j] += p.fc1_b[j];
    c.fc1_out.resize(p.h1);
    for (std::size_t j = 0; j < p.h1; ++j)
        c.fc1_out[j] = detail::leaky(c.fc1_pre[j], p.leaky_slope);

    c.fc2_pre.assign(p.h2, 0.0);
    detail::matvec_accumulate(p.fc2_w, c.fc1_out, c.fc2_pre);
    for (std::size_t j = 0; j < p.h2; ++j)
        c.fc2_pre[j] += p.fc2_b[j];
    c.fc2_out.resize(p.h2);
    for (std::size_t j = 0; j < p.h2; ++j)
        c.fc2_out[j] = detail::leaky(c.fc2_pre[j], p.leaky_slope);

    c.logits.assign(p.out, 0.0);
    detail::matvec_accumulate(p.out_w, c.fc2_out, c.logits);
    for (std::size_t j = 0; j < p.out; ++j)
        c.logits[j] += p.out_b[j];
    detail::check_finite(c.logits, "output layer");

    if (p.head == HeadKind::policy) {
        c.probs = masked_softmax(c.logits, valid_mask);
        detail::check_finite(c.probs, "softmax");
    }
    return c;
}

// Exact reverse-mode gradients for all parameters given dL/dlogits. The conv
// filter gradient is summed over rows (shared filter).
inline NetworkParams backward(const NetworkParams& p, const ForwardCache& c,
                              const std::vector<double>& dlogits) {
    if (c.params_revision != p.revision)
        throw std::runtime_error("contract violation: backward called with a stale forward cache");
    if (dlogits.size() != p.out)
        throw std::invalid_argument("shape error: output gradient length mismatch");

    NetworkParams g = zeros_like(p);

    detail::outer_accumulate(g.out_w, c.fc2_out, dlogits);
    for (std::size_t j = 0; j < p.out; ++j)
        g.out_b[j] += dlogits[j];

    std::vector<double> dh2(p.h2);
    detail::matvec_transpose(p.out_w, dlogits, dh2);
    for (std::size_t j = 0; j < p.h2; ++j)
        dh2[j] *= detail::leaky_grad(c.fc2_pre[j], p.leaky_slope);

    detail::outer_accumulate(g.fc2_w, c.fc1_out, dh2);
    for (std::size_t j = 0; j < p.h2; ++j)
        g.fc2_b[j] += dh2[j];

    std::vector<double> dh1(p.h1);
    detail::matvec_transpose(p.fc2_w, dh2, dh1);
    for (std::size_t j = 0; j < p.h1; ++j)
        dh1[j] *= detail::leaky_grad(c.fc1_pre[j], p.leaky_slope);

    detail::outer_accumulate(g.fc1_w, c.conv_out, dh1);
    for (std::size_t j = 0; j < p.h1; ++j)
        g.fc1_b[j] += dh1[j];

    std::vector<double> dconv(p.conv_rows);
    detail::matvec_transpose(p.fc1_w, dh1, dconv);
    for (std::size_t r = 0; r < p.conv_rows; ++r) {
        double dz = dconv[r] * detail::leaky_grad(c.conv_pre[r], p.leaky_slope);
        g.conv_w[0] += dz * c.input(r, 0);
        g.conv_w[1] += dz * c.input(r, 1);
        g.conv_b += dz;
    }
    return g;
}

struct AdamState {
    NetworkParams m; // first moments, zero-initialized, same shape as params
    NetworkParams v; // second moments
    std::uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

inline AdamState make_adam_state(const NetworkParams& p) {
    AdamState s;
    s.m = zeros_like(p);
    s.v = zeros_like(p);
    return s;
}

enum class StepDirection { descend, ascend };

// Standard Adam with bias correction. `ascend` maximizes the objective the
// gradients describe (policy gradient); `descend` minimizes (DQL loss).
inline void adam_step(NetworkParams& p, const NetworkParams& grads, AdamState& s, double alpha,
                      StepDirection direction) {
    for_each_block(grads, [](std::span<const double> b) {
        for (double x : b)
            if (!std::isfinite(x))
                throw std::runtime_error("numeric error: non-finite gradient");
    });

    s.step += 1;
    double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
    double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
    double sign = direction == StepDirection::ascend ? -1.0 : 1.0;

    std::vector<std::span<double>> pb, mb, vb;
    std::vector<std::span<const double>> gb;
    for_each_block(p, [&](std::span<double> b) { pb.push_back(b); });
    for_each_block(s.m, [&](std::span<double> b) { mb.push_back(b); });
    for_each_block(s.v, [&](std::span<double> b) { vb.push_back(b); });
    for_each_block(grads, [&](std::span<const double> b) { gb.push_back(b); });

    for (std::size_t k = 0; k < pb.size(); ++k) {
        for (std::size_t i = 0; i < pb[k].size(); ++i) {
            double g = sign * gb[k][i];
            mb[k][i] = s.beta1 * mb[k][i] + (1.0 - s.beta1) * g;
            vb[k][i] = s.beta2 * vb[k][i] + (1.0 - s.beta2) * g * g;
            double mhat = mb[k][i] / bc1;
            double vhat = vb[k][i] / bc2;
            pb[k][i] -= alpha * mhat / (std::sqrt(vhat) + s.epsilon);
        }
    }
    ++p.revision;
}

// ---------------------------------------------------------------------------
// Model file: magic "DRAS", u32 version, u32 head kind, u32 dims x4,
// f64 leaky_slope, parameter blocks (LE f64, declaration order), u64 Adam
// step, Adam first-moment blocks, Adam second-moment blocks.
// ---------------------------------------------------------------------------

namespace detail {

inline void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i)
        b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

inline void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    write_u64(out, bits);
}

inline std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw std::runtime_error("model format error: truncated file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

inline std::uint64_t read_u64(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8))
        throw std::runtime_error("model format error: truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline double read_f64(std::istream& in) {
    std::uint64_t bits = read_u64(in);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

inline void write_blocks(std::ostream& out, const NetworkParams& p) {
    for_each_block(p, [&](std::span<const double> b) {
        for (double x : b)
            write_f64(out, x);
    });
}

inline void read_blocks(std::istream& in, NetworkParams& p) {
    for_each_block(p, [&](std::span<double> b) {
        for (double& x : b)
            x = read_f64(in);
    });
}

} // namespace detail

constexpr std::uint32_t kModelVersion = 1;

inline void save_model(const NetworkParams& p, const AdamState& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open model file for writing: " + path);
    out.write("DRAS", 4);
    detail::write_u32(out, kModelVersion);
    detail::write_u32(out, static_cast<std::uint32_t>(p.head));
    detail::write_u32(out, static_cast<std::uint32_t>(p.conv_rows));
    detail::write_u32(out, static_cast<std::uint32_t>(p.h1));
    detail::write_u32(out, static_cast<std::uint32_t>(p.h2));
    detail::write_u32(out, static_cast<std::uint32_t>(p.out));
    detail::write_f64(out, p.leaky_slope);
    detail::write_blocks(out, p);
    detail::write_u64(out, s.step);
    detail::write_blocks(out, s.m);
    detail::write_blocks(out, s.v);
    if (!out)
        throw std::runtime_error("failed writing model file: " + path);
}

struct LoadedModel {
    NetworkParams params;
    AdamState adam;
};

inline LoadedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open model file: " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "DRAS", 4) != 0)
        throw std::runtime_error("model format error: bad magic");
    std::uint32_t version = detail::read_u32(in);
    if (version != kModelVersion)
        throw std::runtime_error("model format error: unsupported version " + std::to_string(version));
    std::uint32_t head = detail::read_u32(in);
    if (head > 1)
        throw std::runtime_error("model format error: unknown head kind");

    LoadedModel model;
    model.params.head = static_cast<HeadKind>(head);
    model.params.conv_rows = detail::read_u32(in);
    model.params.h1 = detail::read_u32(in);
    model.params.h2 = detail::read_u32(in);
    model.params.out = detail::read_u32(in);
    model.params.leaky_slope = detail::read_f64(in);
    model.params.allocate();
    detail::read_blocks(in, model.params);

    model.adam = make_adam_state(model.params);
    model.adam.step = detail::read_u64(in);
    detail::read_blocks(in, model.adam.m);
    detail::read_blocks(in, model.adam.v);
    return model;
}

} // namespace dras
