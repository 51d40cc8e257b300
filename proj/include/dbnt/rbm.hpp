#pragma once

#include "dbnt/matrix.hpp"
#include "dbnt/random.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace dbnt {

// Visible layer family of a single machine. The multinomial kind is the
// replicated softmax used for word counts; the binary kind is the ordinary
// Bernoulli RBM used for the upper layers.
enum class VisibleKind { multinomial, binary };

struct RbmLayer {
    Matrix weights;                  // n_visible x n_hidden
    std::vector<double> visible_bias;
    std::vector<double> hidden_bias;
    VisibleKind kind = VisibleKind::binary;

    std::size_t n_visible() const { return visible_bias.size(); }
    std::size_t n_hidden() const { return hidden_bias.size(); }
};

struct TrainConfig {
    double learning_rate = 0.01;
    double momentum = 0.9;
    double weight_decay = 0.0002;
    std::size_t epochs = 50;
    std::size_t batch_size = 100;
    std::uint64_t seed = 0;
};

struct MomentumState {
    Matrix prev_dw;
    std::vector<double> prev_da; // hidden bias delta
    std::vector<double> prev_db; // visible bias delta

    explicit MomentumState(const RbmLayer& layer)
        : prev_dw(layer.n_visible(), layer.n_hidden()),
          prev_da(layer.n_hidden(), 0.0),
          prev_db(layer.n_visible(), 0.0) {}
};

struct CdGradients {
    Matrix dw;               // n_visible x n_hidden
    std::vector<double> da;  // hidden bias
    std::vector<double> db;  // visible bias
};

// A batch of visible rows. doc_lengths must have one entry per row for the
// multinomial kind and be empty for the binary kind.
struct VisibleBatch {
    const Matrix* rows = nullptr;
    std::span<const std::uint64_t> doc_lengths;
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
};

// p(h_j = 1 | v) = sigmoid(c * a_j + sum_i v_i W_ij), with c = doc_length for
// the multinomial kind and c = 1 for the binary kind.
std::vector<double> hidden_prob(const RbmLayer& layer, std::span<const double> visible,
                                std::optional<std::uint64_t> doc_length = std::nullopt);

// Independent Bernoulli draws, entries 0.0 or 1.0.
std::vector<double> sample_bernoulli(std::span<const double> probs, Rng& rng);

// p(v_i = 1 | h) = sigmoid(b_i + sum_j h_j W_ij); binary kind only.
std::vector<double> visible_prob_binary(const RbmLayer& layer, std::span<const double> hidden);

// softmax over b_i + sum_j h_j W_ij, computed with max subtraction;
// multinomial kind only.
std::vector<double> visible_softmax(const RbmLayer& layer, std::span<const double> hidden);

// Expected counts doc_length * dist for a softmax reconstruction.
std::vector<double> reconstruct_counts(std::span<const double> dist, std::uint64_t doc_length);

// One contrastive-divergence step per document, averaged over the batch:
// positive hidden probabilities, one binary hidden sample, a mean-field
// visible reconstruction (expected counts for the multinomial kind, visible
// probabilities for the binary kind), then negative hidden probabilities.
CdGradients cd1_gradients(const VisibleBatch& batch, const RbmLayer& layer, Rng& rng);

// delta = momentum * prev_delta + lr * (grad - decay * param); decay applies
// to weights only. Updates layer and state in place.
void apply_update(RbmLayer& layer, const CdGradients& grads, MomentumState& state,
                  const TrainConfig& config);

// Per-epoch progress: (epoch, mean reconstruction cross-entropy).
using RbmEpochLogger = std::function<void(std::size_t, double)>;

// Full training loop: N(0, 0.01) weight init, zero biases, CD-1 over
// fixed-order batches (final short batch included) for config.epochs epochs.
// The logger, when set, receives the reconstruction cross-entropy over the
// whole data set after each epoch.
RbmLayer train_rbm(const Matrix& data, std::span<const std::uint64_t> doc_lengths,
                   VisibleKind kind, std::size_t n_hidden, const TrainConfig& config,
                   const RbmEpochLogger& logger = nullptr);

// Mean reconstruction cross-entropy of a data batch under the current
// parameters (logged per epoch during training).
double reconstruction_cross_entropy(const RbmLayer& layer, const VisibleBatch& batch);

} // namespace dbnt
