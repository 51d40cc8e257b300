#pragma once

#include "dbnt/corpus.hpp"
#include "dbnt/dbn.hpp"
#include "dbnt/matrix.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace dbnt {

// Fixed Gaussian noise added to the code layer's pre-activation during
// fine-tuning. Each (doc_id, unit) pair always receives the same draw, so
// the training objective is deterministic.
struct NoiseConfig {
    bool enabled = false;
    double mean = 0.0;
    double variance = 16.0;
    std::uint64_t seed = 0;
};

struct DenseLayer {
    Matrix weights; // input dim x output dim
    std::vector<double> bias;

    std::size_t in_dim() const { return weights.rows(); }
    std::size_t out_dim() const { return weights.cols(); }
};

// Mirrored encoder/decoder stack. layers[0..encoder_depth) is the encoder,
// the rest the decoder. All activations are sigmoid except the last decoder
// layer, which is a softmax over the vocabulary. Layer 0 scales its bias by
// the document length, matching the pretrained replicated softmax.
struct AutoencoderModel {
    std::vector<DenseLayer> layers;
    std::size_t encoder_depth = 0;
    NoiseConfig noise;

    std::size_t input_dim() const { return layers.front().in_dim(); }
    std::size_t code_dim() const { return layers[encoder_depth - 1].out_dim(); }
};

// Mirror the stack: encoder weights are copies of the pretrained weights with
// hidden biases; decoder weights are independent transposed copies with the
// matching visible biases. Parameter-preserving: the forward pass before any
// update reproduces the pretrained reconstruction exactly.
AutoencoderModel unroll(const DbnModel& dbn);

// counts / total, densified to the given dimensionality
std::vector<double> normalize_input(const BowDocument& doc, std::size_t dim);

struct ForwardResult {
    // sigmoid outputs of every layer except the last (encoder activations
    // first; activations[encoder_depth - 1] is the code layer)
    std::vector<std::vector<double>> activations;
    std::vector<double> reconstruction; // softmax over the vocabulary
};

ForwardResult forward(const AutoencoderModel& model, const BowDocument& doc);

// -sum_i target[i] * log(reconstruction[i])
double cross_entropy(std::span<const double> target, std::span<const double> reconstruction);

// Parameters flatten in a fixed order: encoder layers bottom-up, then decoder
// layers code-down; within a layer the weight matrix row-major, then the bias.
std::size_t parameter_count(const AutoencoderModel& model);
std::vector<double> flatten_parameters(const AutoencoderModel& model);
void load_parameters(AutoencoderModel& model, std::span<const double> flat);

// Mean cross-entropy over the batch and its exact gradient in flat order.
// The softmax and cross-entropy are fused at the output for stability.
struct LossAndGradient {
    double loss = 0.0;
    std::vector<double> gradient;
};
LossAndGradient batch_loss_and_gradients(const AutoencoderModel& model,
                                         std::span<const BowDocument> batch);

} // namespace dbnt
