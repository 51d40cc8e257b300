#pragma once

#include "dbnt/finetune.hpp"
#include "dbnt/rbm.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dbnt {

// Flat key=value run configuration. Defaults match the reference
// hyperparameters: learning rate 0.01, momentum 0.9, weight decay 0.0002,
// 50 pretraining epochs with batches of 100, 50 fine-tuning epochs with
// batches of 1000 and 3 line searches, noise variance 16, binarize
// threshold 0.1. Unknown keys are rejected.
struct RunConfig {
    std::vector<std::size_t> layer_sizes;
    TrainConfig pretrain;
    FinetuneConfig finetune;
    bool noise_enabled = false;
    double noise_variance = 16.0;
    double binarize_threshold = 0.1;
    std::uint64_t seed = 0;

    std::string vocab_path;
    std::string corpus_path;
    std::string model_path;
    std::string codes_path;
    std::string output_path;

    // Apply one `key=value` (or `key`, `value` pair); throws config_error on
    // unknown keys or invalid values.
    void set(const std::string& key, const std::string& value);
    // Parse a `key = value` file with `#` comments.
    void load_file(const std::string& path);
};

std::vector<std::size_t> parse_layer_sizes(const std::string& spec);
std::string format_layer_sizes(const std::vector<std::size_t>& sizes);

} // namespace dbnt
