#include "dbnt/container.hpp"

#include "dbnt/autoencoder.hpp"
#include "dbnt/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace dbnt {

namespace {

void put_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 8);
}

void put_f64(std::ofstream& out, double d) {
    std::uint64_t v = std::bit_cast<std::uint64_t>(d);
    put_u64(out, v);
}

std::uint64_t get_u64(std::ifstream& in, const std::string& path) {
    unsigned char buf[8];
    if (!in.read(reinterpret_cast<char*>(buf), 8)) throw data_error("truncated container: " + path);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

std::uint64_t tensor_elements(const NamedTensor& t) {
    std::uint64_t n = 1;
    for (std::uint64_t d : t.dims) n *= d;
    return n;
}

const NamedTensor& find_tensor(const std::vector<NamedTensor>& tensors, const std::string& name) {
    for (const auto& t : tensors)
        if (t.name == name) return t;
    throw data_error("container missing tensor: " + name);
}

bool has_tensor(const std::vector<NamedTensor>& tensors, const std::string& name) {
    for (const auto& t : tensors)
        if (t.name == name) return true;
    return false;
}

} // namespace

void write_container(const std::string& path, const std::vector<NamedTensor>& tensors) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot open for writing: " + path);
    out.write(kContainerMagic, 4);
    put_u64(out, kContainerVersion);
    for (const auto& t : tensors) {
        if (t.data.size() != tensor_elements(t))
            throw std::invalid_argument("tensor payload does not match dims: " + t.name);
        put_u64(out, t.name.size());
        out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        put_u64(out, t.dims.size());
        for (std::uint64_t d : t.dims) put_u64(out, d);
        for (double v : t.data) put_f64(out, v);
    }
    if (!out) throw data_error("write failed: " + path);
}

std::vector<NamedTensor> read_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open: " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kContainerMagic, 4) != 0)
        throw data_error("not a model container: " + path);
    const std::uint64_t version = get_u64(in, path);
    if (version != kContainerVersion)
        throw data_error("unsupported container version " + std::to_string(version) + ": " + path);

    std::vector<NamedTensor> tensors;
    while (true) {
        in.peek();
        if (in.eof()) break;
        NamedTensor t;
        const std::uint64_t name_len = get_u64(in, path);
        if (name_len > (1u << 20)) throw data_error("implausible tensor name length: " + path);
        t.name.resize(name_len);
        if (!in.read(t.name.data(), static_cast<std::streamsize>(name_len)))
            throw data_error("truncated container: " + path);
        const std::uint64_t rank = get_u64(in, path);
        if (rank > 8) throw data_error("implausible tensor rank: " + path);
        t.dims.resize(rank);
        std::uint64_t elems = 1;
        for (std::uint64_t i = 0; i < rank; ++i) {
            t.dims[i] = get_u64(in, path);
            elems *= t.dims[i];
        }
        if (elems > (1ull << 32)) throw data_error("implausible tensor size: " + path);
        t.data.resize(elems);
        for (std::uint64_t i = 0; i < elems; ++i)
            t.data[i] = std::bit_cast<double>(get_u64(in, path));
        tensors.push_back(std::move(t));
    }
    return tensors;
}

std::vector<NamedTensor> dbn_to_tensors(const DbnModel& model) {
    std::vector<NamedTensor> tensors;
    const auto sizes = model.layer_sizes();

    NamedTensor meta_sizes;
    meta_sizes.name = "layer_sizes";
    meta_sizes.dims = {sizes.size()};
    for (std::size_t s : sizes) meta_sizes.data.push_back(static_cast<double>(s));
    tensors.push_back(std::move(meta_sizes));

    NamedTensor meta_kinds;
    meta_kinds.name = "kind_flags";
    meta_kinds.dims = {model.layers.size()};
    for (const auto& layer : model.layers)
        meta_kinds.data.push_back(layer.kind == VisibleKind::multinomial ? 1.0 : 0.0);
    tensors.push_back(std::move(meta_kinds));

    for (std::size_t t = 0; t < model.layers.size(); ++t) {
        const RbmLayer& layer = model.layers[t];
        const std::string prefix = "layer" + std::to_string(t);
        tensors.push_back({prefix + ".W",
                           {layer.n_visible(), layer.n_hidden()},
                           layer.weights.storage()});
        tensors.push_back({prefix + ".vbias", {layer.n_visible()}, layer.visible_bias});
        tensors.push_back({prefix + ".hbias", {layer.n_hidden()}, layer.hidden_bias});
    }
    return tensors;
}

DbnModel dbn_from_tensors(const std::vector<NamedTensor>& tensors) {
    const NamedTensor& sizes = find_tensor(tensors, "layer_sizes");
    const NamedTensor& kinds = find_tensor(tensors, "kind_flags");
    if (sizes.data.size() < 2 || kinds.data.size() + 1 != sizes.data.size())
        throw data_error("inconsistent layer_sizes / kind_flags");

    DbnModel model;
    for (std::size_t t = 0; t + 1 < sizes.data.size(); ++t) {
        const auto d = static_cast<std::size_t>(sizes.data[t]);
        const auto m = static_cast<std::size_t>(sizes.data[t + 1]);
        const std::string prefix = "layer" + std::to_string(t);
        const NamedTensor& w = find_tensor(tensors, prefix + ".W");
        const NamedTensor& vb = find_tensor(tensors, prefix + ".vbias");
        const NamedTensor& hb = find_tensor(tensors, prefix + ".hbias");
        if (w.dims != std::vector<std::uint64_t>{d, m} || vb.data.size() != d ||
            hb.data.size() != m)
            throw data_error("tensor shape mismatch for " + prefix);

        RbmLayer layer;
        layer.kind = kinds.data[t] != 0.0 ? VisibleKind::multinomial : VisibleKind::binary;
        layer.weights = Matrix(d, m);
        layer.weights.storage() = w.data;
        layer.visible_bias = vb.data;
        layer.hidden_bias = hb.data;
        model.layers.push_back(std::move(layer));
    }
    return model;
}

std::vector<NamedTensor> autoencoder_to_tensors(const AutoencoderModel& model) {
    std::vector<NamedTensor> tensors;
    NamedTensor noise;
    noise.name = "noise_config";
    noise.dims = {4};
    noise.data = {model.noise.enabled ? 1.0 : 0.0, model.noise.mean, model.noise.variance,
                  static_cast<double>(model.noise.seed)};
    tensors.push_back(std::move(noise));

    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const DenseLayer& layer = model.layers[l];
        const bool encoder = l < model.encoder_depth;
        const std::size_t t = encoder ? l : l - model.encoder_depth;
        const std::string prefix = (encoder ? "enc" : "dec") + std::to_string(t);
        tensors.push_back({prefix + ".W", {layer.in_dim(), layer.out_dim()}, layer.weights.storage()});
        tensors.push_back({prefix + ".b", {layer.out_dim()}, layer.bias});
    }
    return tensors;
}

AutoencoderModel autoencoder_from_tensors(const std::vector<NamedTensor>& tensors) {
    const NamedTensor& noise = find_tensor(tensors, "noise_config");
    if (noise.data.size() != 4) throw data_error("malformed noise_config");

    AutoencoderModel model;
    model.noise.enabled = noise.data[0] != 0.0;
    model.noise.mean = noise.data[1];
    model.noise.variance = noise.data[2];
    model.noise.seed = static_cast<std::uint64_t>(noise.data[3]);

    for (const char* half : {"enc", "dec"}) {
        for (std::size_t t = 0;; ++t) {
            const std::string prefix = half + std::to_string(t);
            if (!has_tensor(tensors, prefix + ".W")) break;
            const NamedTensor& w = find_tensor(tensors, prefix + ".W");
            const NamedTensor& b = find_tensor(tensors, prefix + ".b");
            if (w.dims.size() != 2 || b.data.size() != w.dims[1])
                throw data_error("tensor shape mismatch for " + prefix);
            DenseLayer layer;
            layer.weights = Matrix(w.dims[0], w.dims[1]);
            layer.weights.storage() = w.data;
            layer.bias = b.data;
            model.layers.push_back(std::move(layer));
        }
        if (half[0] == 'e') model.encoder_depth = model.layers.size();
    }
    if (model.layers.empty() || model.encoder_depth == 0 ||
        model.encoder_depth >= model.layers.size())
        throw data_error("container does not hold a full encoder/decoder stack");
    return model;
}

void save_dbn(const std::string& path, const DbnModel& model) {
    write_container(path, dbn_to_tensors(model));
}

DbnModel load_dbn(const std::string& path) { return dbn_from_tensors(read_container(path)); }

void save_autoencoder(const std::string& path, const AutoencoderModel& model) {
    write_container(path, autoencoder_to_tensors(model));
}

AutoencoderModel load_autoencoder(const std::string& path) {
    return autoencoder_from_tensors(read_container(path));
}

ContainerKind container_kind(const std::vector<NamedTensor>& tensors) {
    if (has_tensor(tensors, "enc0.W")) return ContainerKind::autoencoder;
    if (has_tensor(tensors, "layer0.W")) return ContainerKind::dbn;
    throw data_error("container holds neither a layer stack nor an encoder/decoder stack");
}

} // namespace dbnt
