#include "dbnt/finetune.hpp"

#include "dbnt/errors.hpp"

#include <algorithm>

namespace dbnt {

CgResult cg_minimize(AutoencoderModel& model, std::span<const BowDocument> batch,
                     const FinetuneConfig& config) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    CgOptions options;
    options.line_searches = config.line_searches;

    std::vector<double> x = flatten_parameters(model);
    const Objective objective = [&model, batch](std::span<const double> params,
                                                std::span<double> grad) {
        load_parameters(model, params);
        LossAndGradient lg = batch_loss_and_gradients(model, batch);
        std::copy(lg.gradient.begin(), lg.gradient.end(), grad.begin());
        return lg.loss;
    };
    const CgResult result = cg_minimize(objective, x, options);
    load_parameters(model, x);
    return result;
}

AutoencoderModel finetune(const DbnModel& dbn, const std::vector<BowDocument>& corpus,
                          const FinetuneConfig& config, bool binary_target,
                          const FinetuneLogger& logger) {
    if (corpus.empty()) throw data_error("empty corpus");
    {
        std::string degenerate;
        for (const auto& doc : corpus)
            if (doc.total == 0) degenerate += degenerate.empty() ? doc.doc_id : ", " + doc.doc_id;
        if (!degenerate.empty()) throw data_error("degenerate documents (total = 0): " + degenerate);
    }
    if (config.batch_size == 0) throw config_error("batch size must be positive");

    AutoencoderModel model = unroll(dbn);
    model.noise.enabled = binary_target;
    model.noise.mean = 0.0;
    model.noise.variance = config.noise_variance;
    model.noise.seed = config.seed;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < corpus.size(); start += config.batch_size) {
            const std::size_t end = std::min(start + config.batch_size, corpus.size());
            std::span<const BowDocument> batch(corpus.data() + start, end - start);
            const CgResult result = cg_minimize(model, batch, config);
            loss_sum += result.final_loss;
            ++batches;
        }
        if (logger) logger(epoch, loss_sum / static_cast<double>(batches));
    }
    return model;
}

} // namespace dbnt
