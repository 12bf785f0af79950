#include "photofx/attention.hpp"

#include "photofx/error.hpp"
#include "photofx/rng.hpp"

#include <cmath>
#include <random>

namespace photofx {

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, SplitMix64& gen, double scale) {
    std::normal_distribution<double> dist(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(gen);
    }
    return m;
}

double silu(double x) { return x / (1.0 + std::exp(-x)); }

void require(bool ok, const std::string& message) {
    if (!ok) throw Error(ErrorKind::InvalidArgument, message);
}

void require_heads(Eigen::Index dim, int heads) {
    require(dim >= 2 && heads >= 1 && dim % heads == 0, "attention: head count must divide the channel dimension");
    require((dim / heads) % 2 == 0, "attention: per-head dimension must be even for RoPE");
}

}  // namespace

EncoderParams random_encoder(int inputs, int hidden, int outputs, std::uint64_t seed, double scale) {
    SplitMix64 gen(stream_key(seed, {0xe4c0de}));
    EncoderParams p;
    p.w1 = gaussian_matrix(inputs, hidden, gen, scale);
    p.b1 = gaussian_matrix(1, hidden, gen, scale);
    p.w2 = gaussian_matrix(hidden, outputs, gen, scale);
    p.b2 = gaussian_matrix(1, outputs, gen, scale);
    return p;
}

Matrix encode_rows(const Matrix& inputs, const EncoderParams& p) {
    require(inputs.cols() == p.w1.rows(), "encoder: input width does not match W1");
    require(p.b1.size() == p.w1.cols() && p.w2.rows() == p.w1.cols() && p.b2.size() == p.w2.cols(),
            "encoder: inconsistent parameter shapes");
    Matrix hidden = inputs * p.w1;
    hidden.rowwise() += p.b1;
    hidden = hidden.unaryExpr([](double v) { return silu(v); });
    Matrix out = hidden * p.w2;
    out.rowwise() += p.b2;
    return out;
}

Matrix encode_pho(const PhotoSignal& signal, const EncoderParams& params) {
    validate(signal);
    Matrix in(static_cast<Eigen::Index>(signal.size()), 5);
    for (std::size_t i = 0; i < signal.size(); ++i) {
        const PhotoParams& p = signal[i];
        in.row(static_cast<Eigen::Index>(i)) << p.K, p.d_f, p.f, p.S, p.T;
    }
    return encode_rows(in, params);
}

Matrix encode_traj(const TrajSignal& signal, const EncoderParams& params) {
    validate(signal);
    Matrix in(static_cast<Eigen::Index>(signal.size()), 12);
    for (std::size_t i = 0; i < signal.size(); ++i) {
        for (Eigen::Index k = 0; k < 12; ++k) in(static_cast<Eigen::Index>(i), k) = signal.per_frame[i][static_cast<std::size_t>(k)];
    }
    return encode_rows(in, params);
}

Matrix rope_apply(const Matrix& x, std::span<const double> positions, double base) {
    require(x.cols() % 2 == 0, "rope: feature dimension must be even, got " + std::to_string(x.cols()));
    require(static_cast<Eigen::Index>(positions.size()) == x.rows(), "rope: one position per row required");
    const Eigen::Index dim = x.cols();
    Matrix out = x;
    for (Eigen::Index j = 0; j < dim / 2; ++j) {
        const double freq = std::pow(base, -2.0 * static_cast<double>(j) / static_cast<double>(dim));
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double pos = positions[static_cast<std::size_t>(i)];
            if (pos == 0.0) continue;
            const double c = std::cos(pos * freq);
            const double s = std::sin(pos * freq);
            const double a = x(i, 2 * j);
            const double b = x(i, 2 * j + 1);
            out(i, 2 * j) = a * c - b * s;
            out(i, 2 * j + 1) = a * s + b * c;
        }
    }
    return out;
}

DecoupledAttnWeights init_decoupled_attention(int dim, int heads, std::uint64_t seed, double scale) {
    require_heads(dim, heads);
    SplitMix64 gen(stream_key(seed, {0xa77e}));
    DecoupledAttnWeights w;
    w.w_q = gaussian_matrix(dim, dim, gen, scale);
    w.w_k_traj = gaussian_matrix(dim, dim, gen, scale);
    w.w_v_traj = gaussian_matrix(dim, dim, gen, scale);
    w.w_k_pho = gaussian_matrix(dim, dim, gen, scale);
    w.w_v_pho = gaussian_matrix(dim, dim, gen, scale);
    w.w_o = Matrix::Zero(dim, dim);
    w.heads = heads;
    return w;
}

Matrix softmax_rows(const Matrix& scores) {
    Matrix out(scores.rows(), scores.cols());
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
        const double mx = scores.row(r).maxCoeff();
        double sum = 0.0;
        for (Eigen::Index c = 0; c < scores.cols(); ++c) {
            out(r, c) = std::exp(scores(r, c) - mx);
            sum += out(r, c);
        }
        out.row(r) /= sum;
    }
    return out;
}

namespace {

struct BranchResult {
    Matrix output;
    std::vector<Matrix> probs;
};

BranchResult attend(const Matrix& q, const Matrix& ctrl, const Matrix& w_k, const Matrix& w_v, int heads,
                    double rope_base) {
    const auto tau = static_cast<std::size_t>(ctrl.rows());
    std::vector<double> ctrl_pos(tau);
    for (std::size_t i = 0; i < tau; ++i) ctrl_pos[i] = static_cast<double>(i);
    const Matrix k = rope_apply(ctrl * w_k, ctrl_pos, rope_base);
    const Matrix v = ctrl * w_v;
    const Eigen::Index dk = q.cols() / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
    BranchResult out;
    out.output = Matrix::Zero(q.rows(), q.cols());
    for (int h = 0; h < heads; ++h) {
        const Eigen::Index off = h * dk;
        const Matrix scores = (q.middleCols(off, dk) * k.middleCols(off, dk).transpose()) * scale;
        Matrix p = softmax_rows(scores);
        out.output.middleCols(off, dk) = p * v.middleCols(off, dk);
        out.probs.push_back(std::move(p));
    }
    return out;
}

}  // namespace

AttentionTrace decoupled_cross_attention_trace(const TokenSequence& input, const ControlEmbeddings& ctrl,
                                               const DecoupledAttnWeights& w) {
    const Eigen::Index dim = input.tokens.cols();
    require(input.tokens.rows() >= 1, "attention: need at least one token");
    require(static_cast<Eigen::Index>(input.positions.size()) == input.tokens.rows(),
            "attention: one position per token required");
    require_heads(dim, w.heads);
    for (const Matrix* m : {&w.w_q, &w.w_k_traj, &w.w_v_traj, &w.w_k_pho, &w.w_v_pho, &w.w_o}) {
        require(m->rows() == dim && m->cols() == dim, "attention: projection shapes must be dim x dim");
    }
    require(ctrl.traj.rows() >= 1 && ctrl.pho.rows() >= 1, "attention: control embeddings need at least one row");
    require(ctrl.traj.cols() == dim && ctrl.pho.cols() == dim, "attention: control embedding width mismatch");

    AttentionTrace trace;
    trace.q = rope_apply(input.tokens * w.w_q, input.positions, w.rope_base);
    BranchResult traj = attend(trace.q, ctrl.traj, w.w_k_traj, w.w_v_traj, w.heads, w.rope_base);
    BranchResult pho = attend(trace.q, ctrl.pho, w.w_k_pho, w.w_v_pho, w.heads, w.rope_base);
    trace.o_traj = std::move(traj.output);
    trace.o_pho = std::move(pho.output);
    trace.probs_traj = std::move(traj.probs);
    trace.probs_pho = std::move(pho.probs);
    trace.update = (trace.o_traj + trace.o_pho) * w.w_o;
    trace.output.tokens = input.tokens + trace.update;
    trace.output.positions = input.positions;
    return trace;
}

TokenSequence decoupled_cross_attention(const TokenSequence& input, const ControlEmbeddings& ctrl,
                                        const DecoupledAttnWeights& w) {
    return decoupled_cross_attention_trace(input, ctrl, w).output;
}

namespace {

void require_same(std::span<const double> a, std::span<const double> b, const char* op) {
    require(a.size() == b.size(), std::string(op) + ": shape mismatch (" + std::to_string(a.size()) + " vs " +
                                      std::to_string(b.size()) + ")");
}

}  // namespace

std::vector<double> fm_interpolate(std::span<const double> x0, std::span<const double> x1, double t) {
    require_same(x0, x1, "fm_interpolate");
    require(t >= 0.0 && t <= 1.0, "fm_interpolate: t must lie in [0, 1]");
    std::vector<double> out(x0.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = t * x1[i] + (1.0 - t) * x0[i];
    return out;
}

std::vector<double> fm_target(std::span<const double> x0, std::span<const double> x1) {
    require_same(x0, x1, "fm_target");
    std::vector<double> out(x0.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x1[i] - x0[i];
    return out;
}

double fm_loss(std::span<const double> prediction, std::span<const double> x0, std::span<const double> x1) {
    require_same(x0, x1, "fm_loss");
    require_same(prediction, x0, "fm_loss");
    require(!prediction.empty(), "fm_loss: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const double e = prediction[i] - (x1[i] - x0[i]);
        sum += e * e;
    }
    return sum / static_cast<double>(prediction.size());
}

}  // namespace photofx
