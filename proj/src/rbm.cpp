#include "dbnt/rbm.hpp"

#include "dbnt/errors.hpp"
#include "dbnt/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dbnt {

namespace {

constexpr double kProbFloor = 1e-300;

void check_shapes(const RbmLayer& layer) {
    if (layer.weights.rows() != layer.n_visible() || layer.weights.cols() != layer.n_hidden())
        throw std::invalid_argument("rbm layer shape mismatch");
}

double bias_scale(const RbmLayer& layer, std::optional<std::uint64_t> doc_length) {
    if (layer.kind == VisibleKind::multinomial) {
        if (!doc_length) throw std::invalid_argument("multinomial visible layer requires doc_length");
        if (*doc_length == 0) throw data_error("degenerate document");
        return static_cast<double>(*doc_length);
    }
    if (doc_length) throw std::invalid_argument("doc_length only applies to the multinomial kind");
    return 1.0;
}

} // namespace

std::vector<double> hidden_prob(const RbmLayer& layer, std::span<const double> visible,
                                std::optional<std::uint64_t> doc_length) {
    check_shapes(layer);
    if (visible.size() != layer.n_visible())
        throw std::invalid_argument("visible vector length mismatch");
    const double scale = bias_scale(layer, doc_length);
    const std::size_t m = layer.n_hidden();

    std::vector<double> pre(m);
    for (std::size_t j = 0; j < m; ++j) pre[j] = scale * layer.hidden_bias[j];
    for (std::size_t i = 0; i < visible.size(); ++i) {
        if (visible[i] == 0.0) continue;
        kern::axpy(visible[i], layer.weights.row(i), pre.data(), m);
    }
    std::vector<double> out(m);
    kern::sigmoid(pre.data(), out.data(), m);
    return out;
}

std::vector<double> sample_bernoulli(std::span<const double> probs, Rng& rng) {
    std::vector<double> out(probs.size());
    for (std::size_t j = 0; j < probs.size(); ++j)
        out[j] = rng.uniform() < probs[j] ? 1.0 : 0.0;
    return out;
}

std::vector<double> visible_prob_binary(const RbmLayer& layer, std::span<const double> hidden) {
    check_shapes(layer);
    if (layer.kind != VisibleKind::binary)
        throw std::invalid_argument("visible_prob_binary requires a binary visible layer");
    if (hidden.size() != layer.n_hidden())
        throw std::invalid_argument("hidden vector length mismatch");
    const std::size_t d = layer.n_visible();
    std::vector<double> pre(d);
    for (std::size_t i = 0; i < d; ++i)
        pre[i] = layer.visible_bias[i] + kern::dot(layer.weights.row(i), hidden.data(), hidden.size());
    std::vector<double> out(d);
    kern::sigmoid(pre.data(), out.data(), d);
    return out;
}

std::vector<double> visible_softmax(const RbmLayer& layer, std::span<const double> hidden) {
    check_shapes(layer);
    if (layer.kind != VisibleKind::multinomial)
        throw std::invalid_argument("visible_softmax requires a multinomial visible layer");
    if (hidden.size() != layer.n_hidden())
        throw std::invalid_argument("hidden vector length mismatch");
    const std::size_t d = layer.n_visible();
    std::vector<double> logits(d);
    for (std::size_t i = 0; i < d; ++i)
        logits[i] = layer.visible_bias[i] + kern::dot(layer.weights.row(i), hidden.data(), hidden.size());

    const double mx = kern::vmax(logits.data(), d);
    std::vector<double> out(d);
    const double sum = kern::exp_shift_sum(logits.data(), mx, out.data(), d);
    kern::scal(1.0 / sum, out.data(), d);
    for (double& p : out)
        if (p < kProbFloor) p = kProbFloor;
    return out;
}

std::vector<double> reconstruct_counts(std::span<const double> dist, std::uint64_t doc_length) {
    std::vector<double> out(dist.begin(), dist.end());
    kern::scal(static_cast<double>(doc_length), out.data(), out.size());
    return out;
}

CdGradients cd1_gradients(const VisibleBatch& batch, const RbmLayer& layer, Rng& rng) {
    check_shapes(layer);
    if (batch.rows == nullptr || batch.size() == 0) throw std::invalid_argument("empty batch");
    if (batch.rows->cols() != layer.n_visible())
        throw std::invalid_argument("batch width does not match layer");
    const bool multinomial = layer.kind == VisibleKind::multinomial;
    if (multinomial && batch.doc_lengths.size() != batch.rows->rows())
        throw std::invalid_argument("doc_lengths required per row for the multinomial kind");

    const std::size_t d = layer.n_visible();
    const std::size_t m = layer.n_hidden();
    CdGradients grads{Matrix(d, m), std::vector<double>(m, 0.0), std::vector<double>(d, 0.0)};

    for (std::size_t r = batch.begin; r < batch.end; ++r) {
        const double* v = batch.rows->row(r);
        std::optional<std::uint64_t> len;
        if (multinomial) len = batch.doc_lengths[r];

        const auto h_pos = hidden_prob(layer, {v, d}, len);
        const auto h_sample = sample_bernoulli(h_pos, rng);

        std::vector<double> v_neg;
        if (multinomial) {
            const auto dist = visible_softmax(layer, h_sample);
            v_neg = reconstruct_counts(dist, *len);
        } else {
            v_neg = visible_prob_binary(layer, h_sample);
        }
        const auto h_neg = hidden_prob(layer, v_neg, len);

        for (std::size_t i = 0; i < d; ++i) {
            double* row = grads.dw.row(i);
            if (v[i] != 0.0) kern::axpy(v[i], h_pos.data(), row, m);
            if (v_neg[i] != 0.0) kern::axpy(-v_neg[i], h_neg.data(), row, m);
        }
        for (std::size_t j = 0; j < m; ++j) grads.da[j] += h_pos[j] - h_neg[j];
        for (std::size_t i = 0; i < d; ++i) grads.db[i] += v[i] - v_neg[i];
    }

    const double inv = 1.0 / static_cast<double>(batch.size());
    kern::scal(inv, grads.dw.data(), grads.dw.size());
    kern::scal(inv, grads.da.data(), grads.da.size());
    kern::scal(inv, grads.db.data(), grads.db.size());
    return grads;
}

void apply_update(RbmLayer& layer, const CdGradients& grads, MomentumState& state,
                  const TrainConfig& config) {
    check_shapes(layer);
    if (grads.dw.rows() != layer.n_visible() || grads.dw.cols() != layer.n_hidden() ||
        grads.da.size() != layer.n_hidden() || grads.db.size() != layer.n_visible())
        throw std::invalid_argument("gradient shape mismatch");

    // decayed gradient: dw - lambda * W (decay on weights only)
    std::vector<double> eff = grads.dw.storage();
    if (config.weight_decay != 0.0)
        kern::axpy(-config.weight_decay, layer.weights.data(), eff.data(), eff.size());

    kern::decay_axpy(config.momentum, state.prev_dw.data(), config.learning_rate, eff.data(),
                     eff.size());
    kern::decay_axpy(config.momentum, state.prev_da.data(), config.learning_rate, grads.da.data(),
                     grads.da.size());
    kern::decay_axpy(config.momentum, state.prev_db.data(), config.learning_rate, grads.db.data(),
                     grads.db.size());

    kern::axpy(1.0, state.prev_dw.data(), layer.weights.data(), layer.weights.size());
    kern::axpy(1.0, state.prev_da.data(), layer.hidden_bias.data(), layer.hidden_bias.size());
    kern::axpy(1.0, state.prev_db.data(), layer.visible_bias.data(), layer.visible_bias.size());
}

RbmLayer train_rbm(const Matrix& data, std::span<const std::uint64_t> doc_lengths,
                   VisibleKind kind, std::size_t n_hidden, const TrainConfig& config,
                   const RbmEpochLogger& logger) {
    if (n_hidden == 0) throw config_error("hidden layer size must be positive");
    if (data.rows() == 0) throw data_error("empty training data");
    if (config.batch_size == 0) throw config_error("batch size must be positive");
    if (kind == VisibleKind::multinomial) {
        if (doc_lengths.size() != data.rows())
            throw std::invalid_argument("doc_lengths required per row for the multinomial kind");
        for (std::size_t r = 0; r < data.rows(); ++r)
            if (doc_lengths[r] == 0)
                throw data_error("degenerate document at row " + std::to_string(r));
    } else if (!doc_lengths.empty()) {
        throw std::invalid_argument("doc_lengths only apply to the multinomial kind");
    }

    const std::size_t d = data.cols();
    RbmLayer layer;
    layer.kind = kind;
    layer.weights = Matrix(d, n_hidden);
    layer.visible_bias.assign(d, 0.0);
    layer.hidden_bias.assign(n_hidden, 0.0);

    Rng rng(config.seed);
    for (std::size_t i = 0; i < layer.weights.size(); ++i)
        layer.weights.data()[i] = 0.1 * rng.normal(); // variance 0.01

    MomentumState state(layer);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t start = 0; start < data.rows(); start += config.batch_size) {
            VisibleBatch batch;
            batch.rows = &data;
            batch.doc_lengths = doc_lengths;
            batch.begin = start;
            batch.end = std::min(start + config.batch_size, data.rows());
            const auto grads = cd1_gradients(batch, layer, rng);
            apply_update(layer, grads, state, config);
        }
        if (logger) {
            VisibleBatch all;
            all.rows = &data;
            all.doc_lengths = doc_lengths;
            all.begin = 0;
            all.end = data.rows();
            logger(epoch, reconstruction_cross_entropy(layer, all));
        }
    }
    return layer;
}

double reconstruction_cross_entropy(const RbmLayer& layer, const VisibleBatch& batch) {
    check_shapes(layer);
    const std::size_t d = layer.n_visible();
    double total = 0.0;
    for (std::size_t r = batch.begin; r < batch.end; ++r) {
        const double* v = batch.rows->row(r);
        if (layer.kind == VisibleKind::multinomial) {
            const std::uint64_t len = batch.doc_lengths[r];
            const auto h = hidden_prob(layer, {v, d}, len);
            const auto dist = visible_softmax(layer, h);
            double ce = 0.0;
            const double inv_len = 1.0 / static_cast<double>(len);
            for (std::size_t i = 0; i < d; ++i)
                if (v[i] != 0.0) ce -= v[i] * inv_len * std::log(dist[i]);
            total += ce;
        } else {
            const auto h = hidden_prob(layer, {v, d});
            const auto recon = visible_prob_binary(layer, h);
            double ce = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                ce -= v[i] * std::log(recon[i]) + (1.0 - v[i]) * std::log(1.0 - recon[i]);
            total += ce;
        }
    }
    return total / static_cast<double>(batch.size());
}

} // namespace dbnt
