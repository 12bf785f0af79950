#pragma once

#include "photofx/signals.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace photofx {

using Matrix = Eigen::MatrixXd;

/// Token features (one row per token) with the frame index of each token.
struct TokenSequence {
    Matrix tokens;
    std::vector<double> positions;
};

/// Encoded control signals, one row per control frame.
struct ControlEmbeddings {
    Matrix traj;
    Matrix pho;
};

/// Two-layer MLP: silu(x W1 + b1) W2 + b2.
struct EncoderParams {
    Matrix w1;
    Eigen::RowVectorXd b1;
    Matrix w2;
    Eigen::RowVectorXd b2;
};

/// Encoder with small Gaussian weights (std `scale`), deterministic in seed.
EncoderParams random_encoder(int inputs, int hidden, int outputs, std::uint64_t seed, double scale = 0.5);

/// Rows are PhotoParams as (K, d_f, f, S, T).
Matrix encode_pho(const PhotoSignal& signal, const EncoderParams& params);
/// Rows are the row-major 3x4 extrinsics.
Matrix encode_traj(const TrajSignal& signal, const EncoderParams& params);
Matrix encode_rows(const Matrix& inputs, const EncoderParams& params);

/// Rotary embedding: feature pair (2j, 2j+1) of row i turns by
/// positions[i] * base^(-2j / dim).
Matrix rope_apply(const Matrix& x, std::span<const double> positions, double base = 10000.0);

struct DecoupledAttnWeights {
    Matrix w_q;
    Matrix w_k_traj;
    Matrix w_v_traj;
    Matrix w_k_pho;
    Matrix w_v_pho;
    Matrix w_o;  ///< zero at initialization
    int heads = 1;
    double rope_base = 10000.0;

    int dim() const noexcept { return static_cast<int>(w_q.rows()); }
};

/// Random projections with a zero output projection.
DecoupledAttnWeights init_decoupled_attention(int dim, int heads, std::uint64_t seed, double scale = 0.5);

/// Intermediate results of one forward pass.
struct AttentionTrace {
    Matrix q;                         ///< after RoPE
    Matrix o_traj;                    ///< concatenated heads
    Matrix o_pho;
    std::vector<Matrix> probs_traj;   ///< per head, tokens x control frames
    std::vector<Matrix> probs_pho;
    Matrix update;                    ///< (o_traj + o_pho) W_o
    TokenSequence output;
};

// Camera-decoupled cross-attention. Queries come from the tokens (RoPE at
// token positions); each branch takes keys and values from its own control
// embedding (RoPE at control frame indices 0..tau-1). Per head:
// softmax(Q K^T / sqrt(d_k)) V. The branch outputs are summed, projected by
// W_o and added back to the input tokens.
TokenSequence decoupled_cross_attention(const TokenSequence& input, const ControlEmbeddings& ctrl,
                                        const DecoupledAttnWeights& w);
AttentionTrace decoupled_cross_attention_trace(const TokenSequence& input, const ControlEmbeddings& ctrl,
                                               const DecoupledAttnWeights& w);

/// Numerically stable row softmax.
Matrix softmax_rows(const Matrix& scores);

// Flow-matching utilities.
std::vector<double> fm_interpolate(std::span<const double> x0, std::span<const double> x1, double t);
std::vector<double> fm_target(std::span<const double> x0, std::span<const double> x1);
double fm_loss(std::span<const double> prediction, std::span<const double> x0, std::span<const double> x1);

}  // namespace photofx
