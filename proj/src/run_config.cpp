#include "dbnt/run_config.hpp"

#include "dbnt/errors.hpp"

#include <charconv>
#include <fstream>

namespace dbnt {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_real(const std::string& key, const std::string& value) {
    double v = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw config_error("invalid real for " + key + ": '" + value + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw config_error("invalid integer for " + key + ": '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw config_error("invalid boolean for " + key + ": '" + value + "'");
}

} // namespace

std::vector<std::size_t> parse_layer_sizes(const std::string& spec) {
    std::vector<std::size_t> sizes;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const auto dash = spec.find('-', pos);
        const std::string part =
            spec.substr(pos, dash == std::string::npos ? std::string::npos : dash - pos);
        std::size_t v = 0;
        const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
        if (res.ec != std::errc{} || res.ptr != part.data() + part.size() || v == 0)
            throw config_error("invalid layer_sizes: '" + spec + "'");
        sizes.push_back(v);
        if (dash == std::string::npos) break;
        pos = dash + 1;
    }
    if (sizes.size() < 2) throw config_error("layer_sizes needs at least two sizes: '" + spec + "'");
    return sizes;
}

std::string format_layer_sizes(const std::vector<std::size_t>& sizes) {
    std::string out;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i > 0) out += '-';
        out += std::to_string(sizes[i]);
    }
    return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "layer_sizes") {
        layer_sizes = parse_layer_sizes(value);
    } else if (key == "pretrain.learning_rate") {
        pretrain.learning_rate = parse_real(key, value);
        if (!(pretrain.learning_rate > 0.0)) throw config_error("learning rate must be positive");
    } else if (key == "pretrain.momentum") {
        pretrain.momentum = parse_real(key, value);
        if (pretrain.momentum < 0.0 || pretrain.momentum >= 1.0)
            throw config_error("momentum must lie in [0,1)");
    } else if (key == "pretrain.weight_decay") {
        pretrain.weight_decay = parse_real(key, value);
        if (pretrain.weight_decay < 0.0) throw config_error("weight decay must be nonnegative");
    } else if (key == "pretrain.epochs") {
        pretrain.epochs = parse_uint(key, value);
    } else if (key == "pretrain.batch_size") {
        pretrain.batch_size = parse_uint(key, value);
        if (pretrain.batch_size == 0) throw config_error("batch size must be positive");
    } else if (key == "finetune.epochs") {
        finetune.epochs = parse_uint(key, value);
    } else if (key == "finetune.batch_size") {
        finetune.batch_size = parse_uint(key, value);
        if (finetune.batch_size == 0) throw config_error("batch size must be positive");
    } else if (key == "finetune.line_searches") {
        finetune.line_searches = parse_uint(key, value);
        if (finetune.line_searches == 0) throw config_error("line searches must be positive");
    } else if (key == "noise.enabled") {
        noise_enabled = parse_bool(key, value);
    } else if (key == "noise.variance") {
        noise_variance = parse_real(key, value);
        if (noise_variance < 0.0) throw config_error("noise variance must be nonnegative");
    } else if (key == "binarize.threshold") {
        binarize_threshold = parse_real(key, value);
    } else if (key == "seed") {
        seed = parse_uint(key, value);
    } else if (key == "vocab") {
        vocab_path = value;
    } else if (key == "corpus") {
        corpus_path = value;
    } else if (key == "model") {
        model_path = value;
    } else if (key == "codes") {
        codes_path = value;
    } else if (key == "output") {
        output_path = value;
    } else {
        throw config_error("unknown config key: '" + key + "'");
    }
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw config_error(path + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(trimmed.substr(0, eq));
        const std::string value = trim(trimmed.substr(eq + 1));
        if (key.empty()) throw config_error(path + ":" + std::to_string(line_no) + ": empty key");
        try {
            set(key, value);
        } catch (const config_error& e) {
            throw config_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

} // namespace dbnt
