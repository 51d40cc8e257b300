#pragma once

#include "dbnt/autoencoder.hpp"
#include "dbnt/cg.hpp"
#include "dbnt/corpus.hpp"
#include "dbnt/dbn.hpp"

#include <cstdint>
#include <functional>
#include <span>

namespace dbnt {

struct FinetuneConfig {
    std::size_t epochs = 50;
    std::size_t batch_size = 1000;
    std::size_t line_searches = 3;
    double noise_variance = 16.0; // used when binary codes are the target
    std::uint64_t seed = 0;
};

// Run conjugate gradient on the mean batch cross-entropy, updating the model
// in place. The batch loss never increases across the call.
CgResult cg_minimize(AutoencoderModel& model, std::span<const BowDocument> batch,
                     const FinetuneConfig& config);

// Per-epoch progress: (epoch, mean cross-entropy over the epoch's batches
// after their updates).
using FinetuneLogger = std::function<void(std::size_t, double)>;

// Unroll the pretrained stack and fine-tune by conjugate gradient over
// fixed-order batches. binary_target enables the fixed Gaussian code-layer
// noise (mean 0, variance 16) that pushes code activations toward 0/1.
AutoencoderModel finetune(const DbnModel& dbn, const std::vector<BowDocument>& corpus,
                          const FinetuneConfig& config, bool binary_target,
                          const FinetuneLogger& logger = nullptr);

} // namespace dbnt
