#include "dbnt/container.hpp"
#include "dbnt/corpus.hpp"
#include "dbnt/dbn.hpp"
#include "dbnt/errors.hpp"
#include "dbnt/eval.hpp"
#include "dbnt/finetune.hpp"
#include "dbnt/kernels.hpp"
#include "dbnt/run_config.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace {

struct GlobalArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
};

dbnt::RunConfig build_config(const GlobalArgs& args) {
    dbnt::RunConfig config;
    if (!args.config_path.empty()) config.load_file(args.config_path);
    for (const std::string& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw dbnt::config_error("--set expects key=value, got '" + kv + "'");
        config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (args.seed) config.seed = *args.seed;
    config.pretrain.seed = config.seed;
    config.finetune.seed = config.seed;
    config.finetune.noise_variance = config.noise_variance;
    return config;
}

void add_global_options(CLI::App* cmd, GlobalArgs& args) {
    cmd->add_option("--config", args.config_path, "key = value config file");
    cmd->add_option("--set", args.overrides, "override a config key (key=value, repeatable)");
    cmd->add_option("--seed", args.seed, "random seed");
}

std::string require(const std::string& value, const std::string& what) {
    if (value.empty()) throw dbnt::config_error("missing " + what);
    return value;
}

std::vector<std::size_t> parse_ks(const std::string& spec) {
    std::vector<std::size_t> ks;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const auto comma = spec.find(',', pos);
        const std::string part =
            spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        std::size_t v = 0;
        const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
        if (res.ec != std::errc{} || res.ptr != part.data() + part.size() || v == 0)
            throw dbnt::config_error("invalid neighbor counts: '" + spec + "'");
        ks.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (ks.empty()) throw dbnt::config_error("empty neighbor counts");
    return ks;
}

int run_build_corpus(const std::string& input, std::size_t vocab_size,
                     const std::string& vocab_out, const std::string& corpus_out,
                     double train_fraction, const std::string& train_out,
                     const std::string& test_out, std::uint64_t seed) {
    const auto raw = dbnt::read_raw_text(input);
    {
        std::set<std::string> seen;
        for (const auto& doc : raw)
            if (!seen.insert(doc.doc_id).second)
                throw dbnt::data_error("duplicate doc_id: " + doc.doc_id);
    }
    std::vector<std::vector<std::string>> token_lists;
    token_lists.reserve(raw.size());
    for (const auto& doc : raw) token_lists.push_back(doc.tokens);

    const auto vocab = dbnt::build_vocabulary(token_lists, vocab_size);
    const auto index = vocab.index_map();
    std::vector<dbnt::BowDocument> docs;
    docs.reserve(raw.size());
    for (const auto& doc : raw)
        docs.push_back(dbnt::vectorize(doc.tokens, index, doc.doc_id, doc.label));

    dbnt::write_vocabulary(vocab_out, vocab);
    dbnt::write_corpus(corpus_out, docs);
    std::fprintf(stderr, "[build-corpus] %zu documents, vocabulary %zu -> %s, %s\n", docs.size(),
                 vocab.size(), corpus_out.c_str(), vocab_out.c_str());

    if (train_fraction > 0.0) {
        if (train_out.empty() || test_out.empty())
            throw dbnt::config_error("--train-fraction requires --train-out and --test-out");
        const auto split = dbnt::split_corpus(docs, vocab, train_fraction, seed);
        dbnt::write_corpus(train_out, split.train);
        dbnt::write_corpus(test_out, split.test);
        std::fprintf(stderr, "[build-corpus] split %zu train / %zu test\n", split.train.size(),
                     split.test.size());
    }
    return 0;
}

int run_pretrain(const dbnt::RunConfig& config) {
    const auto vocab = dbnt::read_vocabulary(require(config.vocab_path, "vocab path"));
    const auto docs = dbnt::read_corpus(require(config.corpus_path, "corpus path"));
    if (config.layer_sizes.empty()) throw dbnt::config_error("missing layer_sizes");
    if (config.layer_sizes.front() != vocab.size())
        throw dbnt::config_error("layer_sizes[0] = " + std::to_string(config.layer_sizes.front()) +
                                 " does not match vocabulary size " +
                                 std::to_string(vocab.size()));
    const std::string out = require(config.model_path, "model path");

    const auto model = dbnt::pretrain(
        docs, config.layer_sizes, config.pretrain,
        [&config](std::size_t layer, std::size_t epoch, double ce) {
            std::fprintf(stderr, "[pretrain] layer %zu epoch %zu/%zu reconstruction-ce %.6f\n",
                         layer, epoch + 1, config.pretrain.epochs, ce);
        });
    dbnt::save_dbn(out, model);
    std::fprintf(stderr, "[pretrain] %s-DBN saved to %s\n",
                 dbnt::format_layer_sizes(config.layer_sizes).c_str(), out.c_str());
    return 0;
}

int run_finetune(const dbnt::RunConfig& config) {
    const auto dbn = dbnt::load_dbn(require(config.model_path, "model path"));
    const auto docs = dbnt::read_corpus(require(config.corpus_path, "corpus path"));
    const std::string out = require(config.output_path, "output path");

    const auto model = dbnt::finetune(dbn, docs, config.finetune, config.noise_enabled,
                                      [&config](std::size_t epoch, double ce) {
                                          std::fprintf(stderr,
                                                       "[finetune] epoch %zu/%zu cross-entropy %.6f\n",
                                                       epoch + 1, config.finetune.epochs, ce);
                                      });
    dbnt::save_autoencoder(out, model);
    std::fprintf(stderr, "[finetune] autoencoder saved to %s\n", out.c_str());
    return 0;
}

int run_encode(const dbnt::RunConfig& config, bool binarize_codes) {
    const auto tensors = dbnt::read_container(require(config.model_path, "model path"));
    const auto docs = dbnt::read_corpus(require(config.corpus_path, "corpus path"));
    const std::string out = require(config.codes_path, "codes path");

    std::optional<dbnt::AutoencoderModel> autoencoder;
    std::optional<dbnt::DbnModel> dbn;
    if (dbnt::container_kind(tensors) == dbnt::ContainerKind::autoencoder)
        autoencoder = dbnt::autoencoder_from_tensors(tensors);
    else
        dbn = dbnt::dbn_from_tensors(tensors);

    std::vector<dbnt::LatentCode> codes;
    codes.reserve(docs.size());
    std::size_t skipped = 0;
    for (const auto& doc : docs) {
        if (doc.total == 0) {
            std::fprintf(stderr, "[encode] warning: skipping degenerate document %s\n",
                         doc.doc_id.c_str());
            ++skipped;
            continue;
        }
        dbnt::LatentCode code =
            autoencoder ? dbnt::encode(*autoencoder, doc) : dbnt::encode(*dbn, doc);
        if (binarize_codes) code = dbnt::binarize(code, config.binarize_threshold);
        codes.push_back(std::move(code));
    }
    dbnt::write_codes(out, codes);
    std::fprintf(stderr, "[encode] %zu codes written to %s (%zu skipped)\n", codes.size(),
                 out.c_str(), skipped);
    return skipped == 0 ? 0 : 2;
}

int run_eval(const dbnt::RunConfig& config, const std::string& codes_path,
             const std::string& ks_spec, const std::string& out_path,
             const std::string& model_id, const std::string& corpus_id) {
    const std::string path = codes_path.empty() ? config.codes_path : codes_path;
    const auto codes = dbnt::read_codes(require(path, "codes path"));
    const auto ks = ks_spec.empty() ? dbnt::kDefaultNeighborCounts : parse_ks(ks_spec);
    const auto curve = dbnt::accuracy_measurement(codes, ks);

    std::vector<std::pair<std::string, std::string>> header;
    if (!model_id.empty()) header.emplace_back("model", model_id);
    if (!corpus_id.empty()) header.emplace_back("corpus", corpus_id);
    header.emplace_back("codes", path);
    header.emplace_back("metric",
                        codes.front().kind == dbnt::CodeKind::real ? "euclidean" : "hamming");

    const std::string target = out_path.empty() ? config.output_path : out_path;
    if (target.empty()) {
        std::fputs(dbnt::accuracy_csv(curve, header).c_str(), stdout);
    } else {
        dbnt::write_accuracy_csv(target, curve, header);
        for (const auto& [k, acc] : curve.points)
            std::fprintf(stderr, "[eval] k=%zu accuracy %.4f\n", k, acc);
        std::fprintf(stderr, "[eval] curve written to %s\n", target.c_str());
    }
    return 0;
}

int run_pca(const dbnt::RunConfig& config, const std::string& input, const std::string& kind,
            const std::string& out_path) {
    std::vector<std::vector<double>> vectors;
    std::vector<std::string> ids;
    std::vector<std::string> labels;

    if (kind == "corpus") {
        const auto docs = dbnt::read_corpus(require(input, "input path"));
        std::size_t dim = 0;
        for (const auto& doc : docs)
            for (const auto& [idx, count] : doc.counts) dim = std::max<std::size_t>(dim, idx + 1);
        for (const auto& doc : docs) {
            vectors.push_back(dbnt::to_dense(doc, dim));
            ids.push_back(doc.doc_id);
            labels.push_back(doc.label);
        }
    } else if (kind == "codes") {
        const auto codes = dbnt::read_codes(require(input, "input path"));
        for (const auto& code : codes) {
            if (code.kind == dbnt::CodeKind::real) {
                vectors.push_back(code.values);
            } else {
                std::vector<double> v(code.bits.begin(), code.bits.end());
                vectors.push_back(std::move(v));
            }
            ids.push_back(code.doc_id);
            labels.push_back(code.label);
        }
    } else {
        throw dbnt::config_error("--kind must be 'codes' or 'corpus'");
    }

    const auto projection = dbnt::pca_project(vectors);
    const std::string target = out_path.empty() ? config.output_path : out_path;
    if (target.empty()) {
        std::fputs(dbnt::pca_csv(ids, labels, projection).c_str(), stdout);
    } else {
        dbnt::write_pca_csv(target, ids, labels, projection);
        std::fprintf(stderr, "[pca] explained variance %.4f / %.4f, written to %s\n",
                     projection.explained_variance[0], projection.explained_variance[1],
                     target.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deep belief net topic models: pretrain, fine-tune, encode, evaluate"};
    app.require_subcommand(1);

    GlobalArgs globals;

    auto* build = app.add_subcommand("build-corpus", "tokenized text -> vocabulary + corpus files");
    std::string bc_input, bc_vocab_out, bc_corpus_out, bc_train_out, bc_test_out;
    std::size_t bc_vocab_size = 2000;
    double bc_fraction = 0.0;
    build->add_option("--input", bc_input, "raw text file (doc_id<TAB>label<TAB>tokens)")
        ->required();
    build->add_option("--vocab-size", bc_vocab_size, "vocabulary size (default 2000)");
    build->add_option("--vocab-out", bc_vocab_out, "vocabulary output path")->required();
    build->add_option("--corpus-out", bc_corpus_out, "corpus output path")->required();
    build->add_option("--train-fraction", bc_fraction, "also write a train/test split");
    build->add_option("--train-out", bc_train_out, "train corpus output path");
    build->add_option("--test-out", bc_test_out, "test corpus output path");
    add_global_options(build, globals);

    auto* pretrain_cmd = app.add_subcommand("pretrain", "greedy layer-wise pretraining");
    add_global_options(pretrain_cmd, globals);

    auto* finetune_cmd = app.add_subcommand("finetune", "conjugate-gradient fine-tuning");
    add_global_options(finetune_cmd, globals);

    auto* encode_cmd = app.add_subcommand("encode", "documents -> latent codes");
    bool binarize_codes = false;
    encode_cmd->add_flag("--binarize", binarize_codes, "threshold codes into bits");
    add_global_options(encode_cmd, globals);

    auto* eval_cmd = app.add_subcommand("eval", "accuracy measurement over neighbor counts");
    std::string eval_codes, eval_ks, eval_out, eval_model_id, eval_corpus_id;
    eval_cmd->add_option("--codes", eval_codes, "codes file");
    eval_cmd->add_option("--ks", eval_ks, "comma-separated neighbor counts (default 1,3,7,15,31,63)");
    eval_cmd->add_option("--output", eval_out, "CSV output path (default stdout)");
    eval_cmd->add_option("--model-id", eval_model_id, "model identifier for the CSV header");
    eval_cmd->add_option("--corpus-id", eval_corpus_id, "corpus identifier for the CSV header");
    add_global_options(eval_cmd, globals);

    auto* pca_cmd = app.add_subcommand("pca", "2-component PCA scatter data");
    std::string pca_input, pca_kind = "codes", pca_out;
    pca_cmd->add_option("--input", pca_input, "codes or corpus file");
    pca_cmd->add_option("--kind", pca_kind, "input kind: codes (default) or corpus");
    pca_cmd->add_option("--output", pca_out, "CSV output path (default stdout)");
    add_global_options(pca_cmd, globals);

    CLI11_PARSE(app, argc, argv);

    try {
        const dbnt::RunConfig config = build_config(globals);
        if (build->parsed())
            return run_build_corpus(bc_input, bc_vocab_size, bc_vocab_out, bc_corpus_out,
                                    bc_fraction, bc_train_out, bc_test_out, config.seed);
        if (pretrain_cmd->parsed()) return run_pretrain(config);
        if (finetune_cmd->parsed()) return run_finetune(config);
        if (encode_cmd->parsed()) return run_encode(config, binarize_codes);
        if (eval_cmd->parsed())
            return run_eval(config, eval_codes, eval_ks, eval_out, eval_model_id, eval_corpus_id);
        if (pca_cmd->parsed()) return run_pca(config, pca_input, pca_kind, pca_out);
    } catch (const dbnt::config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const dbnt::divergence_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const dbnt::data_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
