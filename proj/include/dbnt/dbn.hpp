#pragma once

#include "dbnt/corpus.hpp"
#include "dbnt/rbm.hpp"

#include <functional>
#include <vector>

namespace dbnt {

// Stack of greedily trained machines: a replicated softmax at the bottom,
// binary machines above. Layer t couples layer_sizes[t] to layer_sizes[t+1].
struct DbnModel {
    std::vector<RbmLayer> layers;

    std::vector<std::size_t> layer_sizes() const;
};

// Per-epoch progress callback: (layer index, epoch, mean reconstruction
// cross-entropy over the layer's training data).
using PretrainLogger = std::function<void(std::size_t, std::size_t, double)>;

// Greedy layer-wise pretraining. Layer 0 is trained as a replicated softmax
// on raw counts; each higher layer is a binary machine trained on the hidden
// probabilities of the (already trained) layer below. Each layer reuses the
// same TrainConfig with the seed offset by the layer index.
DbnModel pretrain(const std::vector<BowDocument>& corpus,
                  const std::vector<std::size_t>& layer_sizes, const TrainConfig& config,
                  const PretrainLogger& logger = nullptr);

// Deterministic upward inference: one probability vector per hidden layer.
std::vector<std::vector<double>> up_pass(const BowDocument& doc, const DbnModel& model);

} // namespace dbnt
