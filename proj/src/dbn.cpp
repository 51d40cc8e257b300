#include "dbnt/dbn.hpp"

#include "dbnt/errors.hpp"

#include <string>

namespace dbnt {

std::vector<std::size_t> DbnModel::layer_sizes() const {
    std::vector<std::size_t> sizes;
    if (layers.empty()) return sizes;
    sizes.push_back(layers.front().n_visible());
    for (const auto& layer : layers) sizes.push_back(layer.n_hidden());
    return sizes;
}

DbnModel pretrain(const std::vector<BowDocument>& corpus,
                  const std::vector<std::size_t>& layer_sizes, const TrainConfig& config,
                  const PretrainLogger& logger) {
    if (layer_sizes.size() < 2) throw config_error("need at least two layer sizes");
    for (std::size_t s : layer_sizes)
        if (s == 0) throw config_error("layer sizes must be positive");
    if (corpus.empty()) throw data_error("empty corpus");
    {
        std::string degenerate;
        for (const auto& doc : corpus)
            if (doc.total == 0) degenerate += degenerate.empty() ? doc.doc_id : ", " + doc.doc_id;
        if (!degenerate.empty()) throw data_error("degenerate documents (total = 0): " + degenerate);
    }

    const std::size_t d = layer_sizes[0];
    const std::size_t n = corpus.size();

    Matrix input(n, d);
    std::vector<std::uint64_t> lengths(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto dense = to_dense(corpus[r], d);
        std::copy(dense.begin(), dense.end(), input.row(r));
        lengths[r] = corpus[r].total;
    }

    DbnModel model;
    for (std::size_t t = 0; t + 1 < layer_sizes.size(); ++t) {
        const VisibleKind kind = t == 0 ? VisibleKind::multinomial : VisibleKind::binary;
        TrainConfig layer_config = config;
        layer_config.seed = config.seed + t;

        RbmEpochLogger layer_logger;
        if (logger)
            layer_logger = [&logger, t](std::size_t epoch, double ce) { logger(t, epoch, ce); };

        RbmLayer layer = train_rbm(input,
                                   kind == VisibleKind::multinomial
                                       ? std::span<const std::uint64_t>(lengths)
                                       : std::span<const std::uint64_t>{},
                                   kind, layer_sizes[t + 1], layer_config, layer_logger);

        // hidden probabilities become the next layer's training data
        if (t + 2 < layer_sizes.size()) {
            Matrix next(n, layer_sizes[t + 1]);
            for (std::size_t r = 0; r < n; ++r) {
                std::optional<std::uint64_t> len;
                if (kind == VisibleKind::multinomial) len = lengths[r];
                const auto h = hidden_prob(layer, {input.row(r), input.cols()}, len);
                std::copy(h.begin(), h.end(), next.row(r));
            }
            input = std::move(next);
        }
        model.layers.push_back(std::move(layer));
    }
    return model;
}

std::vector<std::vector<double>> up_pass(const BowDocument& doc, const DbnModel& model) {
    if (model.layers.empty()) throw std::invalid_argument("empty model");
    if (doc.total == 0) throw data_error("degenerate document: " + doc.doc_id);

    std::vector<std::vector<double>> activations;
    activations.reserve(model.layers.size());
    std::vector<double> current = to_dense(doc, model.layers.front().n_visible());
    for (std::size_t t = 0; t < model.layers.size(); ++t) {
        std::optional<std::uint64_t> len;
        if (model.layers[t].kind == VisibleKind::multinomial) len = doc.total;
        current = hidden_prob(model.layers[t], current, len);
        activations.push_back(current);
    }
    return activations;
}

} // namespace dbnt
