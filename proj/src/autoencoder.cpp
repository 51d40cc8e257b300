#include "dbnt/autoencoder.hpp"

#include "dbnt/errors.hpp"
#include "dbnt/kernels.hpp"
#include "dbnt/random.hpp"

#include <cmath>
#include <stdexcept>

namespace dbnt {

namespace {

constexpr double kProbFloor = 1e-300;

void check_model(const AutoencoderModel& model) {
    if (model.layers.empty() || model.encoder_depth == 0 ||
        model.encoder_depth >= model.layers.size())
        throw std::invalid_argument("malformed autoencoder");
    for (std::size_t l = 0; l + 1 < model.layers.size(); ++l)
        if (model.layers[l].out_dim() != model.layers[l + 1].in_dim())
            throw std::invalid_argument("autoencoder layer shapes do not chain");
    if (model.layers.front().in_dim() != model.layers.back().out_dim())
        throw std::invalid_argument("reconstruction dimension must match the input");
}

double noise_std(const NoiseConfig& noise) { return std::sqrt(noise.variance); }

// pre-activation of layer l given its input; writes into `pre`
void layer_preactivation(const AutoencoderModel& model, std::size_t l,
                         std::span<const double> input, double bias_scale,
                         const BowDocument& doc, std::vector<double>& pre) {
    const DenseLayer& layer = model.layers[l];
    const std::size_t out = layer.out_dim();
    pre.assign(out, 0.0);
    for (std::size_t j = 0; j < out; ++j) pre[j] = bias_scale * layer.bias[j];
    for (std::size_t i = 0; i < layer.in_dim(); ++i) {
        if (input[i] == 0.0) continue;
        kern::axpy(input[i], layer.weights.row(i), pre.data(), out);
    }
    if (model.noise.enabled && l == model.encoder_depth - 1) {
        const double sd = noise_std(model.noise);
        for (std::size_t j = 0; j < out; ++j)
            pre[j] += model.noise.mean + sd * hashed_normal(model.noise.seed, doc.doc_id, j);
    }
}

void softmax_inplace(std::vector<double>& logits) {
    const double mx = kern::vmax(logits.data(), logits.size());
    std::vector<double> out(logits.size());
    const double sum = kern::exp_shift_sum(logits.data(), mx, out.data(), out.size());
    kern::scal(1.0 / sum, out.data(), out.size());
    for (double& p : out)
        if (p < kProbFloor) p = kProbFloor;
    logits = std::move(out);
}

} // namespace

AutoencoderModel unroll(const DbnModel& dbn) {
    if (dbn.layers.empty()) throw std::invalid_argument("empty model");
    AutoencoderModel model;
    model.encoder_depth = dbn.layers.size();
    for (const RbmLayer& rbm : dbn.layers) {
        DenseLayer enc;
        enc.weights = rbm.weights;
        enc.bias = rbm.hidden_bias;
        model.layers.push_back(std::move(enc));
    }
    for (std::size_t t = dbn.layers.size(); t-- > 0;) {
        const RbmLayer& rbm = dbn.layers[t];
        DenseLayer dec;
        dec.weights = Matrix(rbm.n_hidden(), rbm.n_visible());
        for (std::size_t i = 0; i < rbm.n_visible(); ++i)
            for (std::size_t j = 0; j < rbm.n_hidden(); ++j)
                dec.weights(j, i) = rbm.weights(i, j);
        dec.bias = rbm.visible_bias;
        model.layers.push_back(std::move(dec));
    }
    check_model(model);
    return model;
}

std::vector<double> normalize_input(const BowDocument& doc, std::size_t dim) {
    if (doc.total == 0) throw data_error("degenerate document: " + doc.doc_id);
    std::vector<double> v = to_dense(doc, dim);
    kern::scal(1.0 / static_cast<double>(doc.total), v.data(), dim);
    return v;
}

ForwardResult forward(const AutoencoderModel& model, const BowDocument& doc) {
    check_model(model);
    if (doc.total == 0) throw data_error("degenerate document: " + doc.doc_id);

    ForwardResult result;
    result.activations.reserve(model.layers.size() - 1);
    std::vector<double> current = to_dense(doc, model.input_dim());
    std::vector<double> pre;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const double scale = l == 0 ? static_cast<double>(doc.total) : 1.0;
        layer_preactivation(model, l, current, scale, doc, pre);
        if (l + 1 < model.layers.size()) {
            std::vector<double> act(pre.size());
            kern::sigmoid(pre.data(), act.data(), act.size());
            result.activations.push_back(act);
            current = std::move(act);
        } else {
            softmax_inplace(pre);
            result.reconstruction = std::move(pre);
        }
    }
    return result;
}

double cross_entropy(std::span<const double> target, std::span<const double> reconstruction) {
    if (target.size() != reconstruction.size())
        throw std::invalid_argument("cross_entropy length mismatch");
    double ce = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i)
        if (target[i] != 0.0) ce -= target[i] * std::log(reconstruction[i]);
    return ce;
}

std::size_t parameter_count(const AutoencoderModel& model) {
    std::size_t n = 0;
    for (const auto& layer : model.layers) n += layer.weights.size() + layer.bias.size();
    return n;
}

std::vector<double> flatten_parameters(const AutoencoderModel& model) {
    std::vector<double> flat;
    flat.reserve(parameter_count(model));
    for (const auto& layer : model.layers) {
        flat.insert(flat.end(), layer.weights.storage().begin(), layer.weights.storage().end());
        flat.insert(flat.end(), layer.bias.begin(), layer.bias.end());
    }
    return flat;
}

void load_parameters(AutoencoderModel& model, std::span<const double> flat) {
    if (flat.size() != parameter_count(model))
        throw std::invalid_argument("flat parameter length mismatch");
    std::size_t offset = 0;
    for (auto& layer : model.layers) {
        std::copy(flat.begin() + offset, flat.begin() + offset + layer.weights.size(),
                  layer.weights.data());
        offset += layer.weights.size();
        std::copy(flat.begin() + offset, flat.begin() + offset + layer.bias.size(),
                  layer.bias.data());
        offset += layer.bias.size();
    }
}

LossAndGradient batch_loss_and_gradients(const AutoencoderModel& model,
                                         std::span<const BowDocument> batch) {
    check_model(model);
    if (batch.empty()) throw std::invalid_argument("empty batch");

    const std::size_t n_layers = model.layers.size();
    std::vector<Matrix> dw(n_layers);
    std::vector<std::vector<double>> db(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        dw[l] = Matrix(model.layers[l].in_dim(), model.layers[l].out_dim());
        db[l].assign(model.layers[l].out_dim(), 0.0);
    }

    double loss = 0.0;
    std::vector<double> input;
    std::vector<double> delta, delta_prev;
    for (const BowDocument& doc : batch) {
        const ForwardResult fwd = forward(model, doc);
        const auto target = normalize_input(doc, model.input_dim());
        loss += cross_entropy(target, fwd.reconstruction);

        // fused softmax + cross-entropy: gradient w.r.t. the output logits
        delta.assign(fwd.reconstruction.begin(), fwd.reconstruction.end());
        kern::axpy(-1.0, target.data(), delta.data(), delta.size());

        input = to_dense(doc, model.input_dim());
        for (std::size_t l = n_layers; l-- > 0;) {
            const DenseLayer& layer = model.layers[l];
            const std::vector<double>& u = l == 0 ? input : fwd.activations[l - 1];
            const double bias_scale = l == 0 ? static_cast<double>(doc.total) : 1.0;

            for (std::size_t i = 0; i < layer.in_dim(); ++i) {
                if (u[i] == 0.0) continue;
                kern::axpy(u[i], delta.data(), dw[l].row(i), layer.out_dim());
            }
            kern::axpy(bias_scale, delta.data(), db[l].data(), layer.out_dim());

            if (l == 0) break;
            delta_prev.resize(layer.in_dim());
            for (std::size_t i = 0; i < layer.in_dim(); ++i)
                delta_prev[i] = kern::dot(layer.weights.row(i), delta.data(), layer.out_dim());
            // through the sigmoid of the layer below
            for (std::size_t i = 0; i < layer.in_dim(); ++i)
                delta_prev[i] *= u[i] * (1.0 - u[i]);
            std::swap(delta, delta_prev);
        }
    }

    const double inv = 1.0 / static_cast<double>(batch.size());
    LossAndGradient out;
    out.loss = loss * inv;
    out.gradient.reserve(parameter_count(model));
    for (std::size_t l = 0; l < n_layers; ++l) {
        kern::scal(inv, dw[l].data(), dw[l].size());
        kern::scal(inv, db[l].data(), db[l].size());
        out.gradient.insert(out.gradient.end(), dw[l].storage().begin(), dw[l].storage().end());
        out.gradient.insert(out.gradient.end(), db[l].begin(), db[l].end());
    }
    return out;
}

} // namespace dbnt
