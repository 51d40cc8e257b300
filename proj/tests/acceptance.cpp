// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run everything or a subset: `acceptance [--only 1,3,8]`.

#include "dbnt/autoencoder.hpp"
#include "dbnt/cg.hpp"
#include "dbnt/codes.hpp"
#include "dbnt/container.hpp"
#include "dbnt/corpus.hpp"
#include "dbnt/dbn.hpp"
#include "dbnt/eval.hpp"
#include "dbnt/finetune.hpp"
#include "dbnt/kernels.hpp"
#include "dbnt/random.hpp"
#include "dbnt/rbm.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
    int id;
    std::string name;
    std::function<bool(std::string&)> run;
};

// ---------------------------------------------------------------------------
// criterion 1: analytic gradients vs central finite differences
// ---------------------------------------------------------------------------

dbnt::DbnModel random_dbn(const std::vector<std::size_t>& sizes, std::uint64_t seed) {
    dbnt::Rng rng(seed);
    dbnt::DbnModel model;
    for (std::size_t t = 0; t + 1 < sizes.size(); ++t) {
        dbnt::RbmLayer layer;
        layer.kind = t == 0 ? dbnt::VisibleKind::multinomial : dbnt::VisibleKind::binary;
        layer.weights = dbnt::Matrix(sizes[t], sizes[t + 1]);
        for (std::size_t i = 0; i < layer.weights.size(); ++i)
            layer.weights.data()[i] = 0.3 * rng.normal();
        layer.visible_bias.resize(sizes[t]);
        layer.hidden_bias.resize(sizes[t + 1]);
        for (double& b : layer.visible_bias) b = 0.2 * rng.normal();
        for (double& b : layer.hidden_bias) b = 0.2 * rng.normal();
        model.layers.push_back(std::move(layer));
    }
    return model;
}

dbnt::BowDocument random_doc(std::size_t vocab, dbnt::Rng& rng, const std::string& id) {
    dbnt::BowDocument doc;
    doc.doc_id = id;
    for (std::uint32_t w = 0; w < vocab; ++w) {
        if (rng.uniform() < 0.4) continue;
        const auto count = static_cast<std::uint32_t>(1 + rng.below(5));
        doc.counts.emplace_back(w, count);
        doc.total += count;
    }
    if (doc.counts.empty()) {
        doc.counts.emplace_back(0, 1);
        doc.total = 1;
    }
    return doc;
}

bool criterion_gradient_oracle(std::string& detail) {
    const double step = 1e-5;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto model = dbnt::unroll(random_dbn({6, 3, 2}, seed));
        dbnt::Rng rng(seed * 131 + 5);
        std::vector<dbnt::BowDocument> batch;
        for (int i = 0; i < 3; ++i)
            batch.push_back(random_doc(6, rng, "g" + std::to_string(i)));

        const auto analytic = dbnt::batch_loss_and_gradients(model, batch);
        std::vector<double> params = dbnt::flatten_parameters(model);
        double gmax = 1.0;
        for (double g : analytic.gradient) gmax = std::max(gmax, std::fabs(g));
        const double floor = 1e-2 * gmax; // guards finite-difference round-off

        auto loss_at = [&](const std::vector<double>& p) {
            dbnt::load_parameters(model, p);
            double loss = 0.0;
            for (const auto& doc : batch)
                loss += dbnt::cross_entropy(dbnt::normalize_input(doc, model.input_dim()),
                                            dbnt::forward(model, doc).reconstruction);
            return loss / static_cast<double>(batch.size());
        };

        for (std::size_t i = 0; i < params.size(); ++i) {
            const double saved = params[i];
            params[i] = saved + step;
            const double up = loss_at(params);
            params[i] = saved - step;
            const double down = loss_at(params);
            params[i] = saved;
            const double fd = (up - down) / (2.0 * step);
            const double denom =
                std::max({std::fabs(fd), std::fabs(analytic.gradient[i]), floor});
            worst = std::max(worst, std::fabs(fd - analytic.gradient[i]) / denom);
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max relative error %.3e (bound 1e-5)", worst);
    detail = buf;
    return worst < 1e-5;
}

// ---------------------------------------------------------------------------
// criterion 2: replicated softmax CD fixed point on a (0.9, 0.1) corpus
// ---------------------------------------------------------------------------

bool criterion_cd_fixed_point(std::string& detail) {
    dbnt::Matrix data(200, 2);
    std::vector<std::uint64_t> lengths(200, 10);
    for (std::size_t r = 0; r < 200; ++r) {
        data(r, 0) = 9.0;
        data(r, 1) = 1.0;
    }
    dbnt::TrainConfig config; // paper defaults: 0.01 / 0.9 / 0.0002 / 50 epochs
    config.seed = 42;
    const auto layer = dbnt::train_rbm(data, lengths, dbnt::VisibleKind::multinomial, 8, config);

    double mean0 = 0.0, mean1 = 0.0;
    for (std::size_t r = 0; r < 200; ++r) {
        const auto h = dbnt::hidden_prob(layer, {data.row(r), 2}, lengths[r]);
        const auto dist = dbnt::visible_softmax(layer, h);
        mean0 += dist[0];
        mean1 += dist[1];
    }
    mean0 /= 200.0;
    mean1 /= 200.0;
    const double tv = 0.5 * (std::fabs(mean0 - 0.9) + std::fabs(mean1 - 0.1));
    char buf[96];
    std::snprintf(buf, sizeof(buf), "mean reconstruction (%.4f, %.4f), TV %.4f (bound 0.05)",
                  mean0, mean1, tv);
    detail = buf;
    return tv <= 0.05;
}

// ---------------------------------------------------------------------------
// criteria 3, 4, 9: desk-scale retrieval pipeline
// ---------------------------------------------------------------------------

struct PipelineResults {
    dbnt::AccuracyCurve baseline;
    dbnt::AccuracyCurve real_curve;
    dbnt::AccuracyCurve binary_curve;
    double hardened_fraction = 0.0;
    bool ready = false;
};

PipelineResults& pipeline() {
    static PipelineResults results;
    if (results.ready) return results;

    dbnt_test::TopicCorpusConfig corpus_config;
    corpus_config.n_docs = 1100;
    corpus_config.n_classes = 4;
    corpus_config.vocab_size = 1000;
    corpus_config.class_block = 150;
    corpus_config.min_len = 30;
    corpus_config.max_len = 150;
    corpus_config.background_mass = 0.5;
    corpus_config.seed = 20140613;
    const auto corpus = dbnt_test::make_topic_corpus(corpus_config);

    const auto split = dbnt::split_corpus(corpus.docs, corpus.vocabulary, 0.7, 17);
    std::fprintf(stderr, "  [pipeline] %zu train / %zu test documents\n", split.train.size(),
                 split.test.size());

    const std::vector<std::size_t> arch{1000, 250, 125, 32};
    dbnt::TrainConfig pre_config;
    pre_config.seed = 1;
    const auto t0 = Clock::now();
    const auto dbn = dbnt::pretrain(split.train, arch, pre_config,
                                    [](std::size_t layer, std::size_t epoch, double ce) {
                                        if ((epoch + 1) % 10 == 0)
                                            std::fprintf(stderr,
                                                         "  [pipeline] layer %zu epoch %zu ce %.4f\n",
                                                         layer, epoch + 1, ce);
                                    });
    const auto t1 = Clock::now();
    std::fprintf(stderr, "  [pipeline] pretraining took %.1fs\n",
                 std::chrono::duration<double>(t1 - t0).count());

    dbnt::FinetuneConfig ft_config;
    ft_config.seed = 2;
    const auto real_model = dbnt::finetune(dbn, split.train, ft_config, false,
                                           [](std::size_t epoch, double ce) {
                                               if ((epoch + 1) % 10 == 0)
                                                   std::fprintf(stderr,
                                                                "  [pipeline] real ft epoch %zu ce %.4f\n",
                                                                epoch + 1, ce);
                                           });
    const auto t2 = Clock::now();
    std::fprintf(stderr, "  [pipeline] real fine-tuning took %.1fs\n",
                 std::chrono::duration<double>(t2 - t1).count());

    const auto binary_model = dbnt::finetune(dbn, split.train, ft_config, true,
                                             [](std::size_t epoch, double ce) {
                                                 if ((epoch + 1) % 10 == 0)
                                                     std::fprintf(stderr,
                                                                  "  [pipeline] binary ft epoch %zu ce %.4f\n",
                                                                  epoch + 1, ce);
                                             });
    const auto t3 = Clock::now();
    std::fprintf(stderr, "  [pipeline] binary fine-tuning took %.1fs\n",
                 std::chrono::duration<double>(t3 - t2).count());

    std::vector<dbnt::LatentCode> real_codes, binary_codes;
    for (const auto& doc : split.test) {
        real_codes.push_back(dbnt::encode(real_model, doc));
        binary_codes.push_back(dbnt::binarize(dbnt::encode(binary_model, doc), 0.1));
    }

    results.baseline = dbnt::baseline_input_accuracy(split.test, dbnt::kDefaultNeighborCounts,
                                                     corpus_config.vocab_size);
    results.real_curve = dbnt::accuracy_measurement(real_codes, dbnt::kDefaultNeighborCounts);
    results.binary_curve = dbnt::accuracy_measurement(binary_codes, dbnt::kDefaultNeighborCounts);

    std::size_t outside = 0, total = 0;
    for (const auto& doc : split.train) {
        const auto code = dbnt::encode(binary_model, doc);
        for (double v : code.values) {
            outside += v <= 0.1 || v >= 0.9;
            ++total;
        }
    }
    results.hardened_fraction = static_cast<double>(outside) / static_cast<double>(total);
    results.ready = true;
    return results;
}

std::string curve_to_string(const dbnt::AccuracyCurve& curve) {
    std::ostringstream ss;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        if (i > 0) ss << ' ';
        ss << curve.points[i].first << ':' << std::fixed << std::setprecision(3)
           << curve.points[i].second;
    }
    return ss.str();
}

bool criterion_better_than_input(std::string& detail) {
    const auto& r = pipeline();
    std::size_t slack_used = 0;
    bool ok = true;
    for (std::size_t i = 0; i < r.real_curve.points.size(); ++i) {
        const double diff = r.real_curve.points[i].second - r.baseline.points[i].second;
        if (diff < -0.01) ok = false;
        else if (diff < 0.0) ++slack_used;
    }
    if (slack_used > 1) ok = false;
    detail = "latent " + curve_to_string(r.real_curve) + " vs input " +
             curve_to_string(r.baseline) +
             (slack_used > 0 ? " (slack at " + std::to_string(slack_used) + " k)" : "");
    return ok;
}

bool criterion_binary_close_to_real(std::string& detail) {
    const auto& r = pipeline();
    double worst = 0.0;
    for (std::size_t i = 0; i < r.real_curve.points.size(); ++i)
        worst = std::max(worst, std::fabs(r.binary_curve.points[i].second -
                                          r.real_curve.points[i].second));
    char buf[64];
    std::snprintf(buf, sizeof(buf), " max gap %.3f (bound 0.05)", worst);
    detail = "hamming " + curve_to_string(r.binary_curve) + " vs euclidean " +
             curve_to_string(r.real_curve) + buf;
    return worst <= 0.05;
}

bool criterion_noise_hardening(std::string& detail) {
    const auto& r = pipeline();
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  "%.1f%% of code activations outside (0.1, 0.9) (bound 90%%)",
                  100.0 * r.hardened_fraction);
    detail = buf;
    return r.hardened_fraction >= 0.9;
}

// ---------------------------------------------------------------------------
// criterion 5: evaluator vs brute-force oracle
// ---------------------------------------------------------------------------

bool criterion_evaluator_oracle(std::string& detail) {
    const std::vector<std::size_t> ks = dbnt::kDefaultNeighborCounts;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        dbnt::Rng rng(seed * 7919);
        std::vector<dbnt::LatentCode> codes;
        for (int i = 0; i < 100; ++i) {
            dbnt::LatentCode code;
            code.kind = dbnt::CodeKind::real;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "q%04d", i);
            code.doc_id = buf;
            code.label = "l" + std::to_string(rng.below(4));
            code.values.resize(6);
            for (double& v : code.values) v = rng.uniform();
            codes.push_back(std::move(code));
        }
        const auto fast = dbnt::accuracy_measurement(codes, ks);
        const auto slow = dbnt_test::brute_force_accuracy(codes, ks);
        for (std::size_t i = 0; i < ks.size(); ++i) {
            if (fast.points[i].second != slow.points[i].second) {
                char buf[96];
                std::snprintf(buf, sizeof(buf), "mismatch at seed %llu k=%zu",
                              static_cast<unsigned long long>(seed), ks[i]);
                detail = buf;
                return false;
            }
        }
    }
    detail = "exact agreement over 20 seeds x 100 codes";
    return true;
}

// ---------------------------------------------------------------------------
// criterion 6: conjugate gradient exactness on a convex quadratic
// ---------------------------------------------------------------------------

bool criterion_cg_exactness(std::string& detail) {
    const std::size_t n = 20;
    dbnt::Rng rng(314159);
    std::vector<std::vector<double>> q(n, std::vector<double>(n));
    for (auto& row : q)
        for (double& v : row) v = rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            double proj = 0.0;
            for (std::size_t k = 0; k < n; ++k) proj += q[i][k] * q[j][k];
            for (std::size_t k = 0; k < n; ++k) q[i][k] -= proj * q[j][k];
        }
        double norm = 0.0;
        for (double v : q[i]) norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : q[i]) v /= norm;
    }
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double lambda = 1.0 + 9.0 * rng.uniform();
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) a[r][c] += q[i][r] * lambda * q[i][c];
    }
    std::vector<double> b(n);
    for (double& v : b) v = 2.0 * (rng.uniform() - 0.5);

    const dbnt::Objective f = [&](std::span<const double> x, std::span<double> grad) {
        double value = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += a[i][j] * x[j];
            grad[i] = row - b[i];
            value += 0.5 * x[i] * row - b[i] * x[i];
        }
        return value;
    };

    const auto expected = dbnt_test::solve_linear(a, b);
    std::vector<double> x(n, 0.0);
    dbnt::CgOptions options;
    options.line_searches = 20;
    const auto result = dbnt::cg_minimize(f, x, options);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::fabs(x[i] - expected[i]));
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max coordinate error %.3e after %zu line searches",
                  err, result.line_searches_done);
    detail = buf;
    return err < 1e-8;
}

// ---------------------------------------------------------------------------
// criterion 7: PCA vs an independent SVD
// ---------------------------------------------------------------------------

bool criterion_pca_oracle(std::string& detail) {
    dbnt::Rng rng(271828);
    std::vector<std::vector<double>> vectors;
    for (int i = 0; i < 50; ++i) {
        std::vector<double> v(10);
        for (double& x : v) x = rng.normal();
        vectors.push_back(std::move(v));
    }
    const auto projection = dbnt::pca_project(vectors);

    std::vector<double> mean(10, 0.0);
    for (const auto& v : vectors)
        for (int j = 0; j < 10; ++j) mean[j] += v[j] / 50.0;
    auto centered = vectors;
    for (auto& v : centered)
        for (int j = 0; j < 10; ++j) v[j] -= mean[j];
    const auto svd = dbnt_test::jacobi_svd(centered);

    double worst = 0.0;
    for (int comp = 0; comp < 2; ++comp) {
        double sign = 0.0;
        for (std::size_t i = 0; i < centered.size() && sign == 0.0; ++i) {
            double oracle = 0.0;
            for (int j = 0; j < 10; ++j) oracle += centered[i][j] * svd.right_vectors[comp][j];
            if (std::fabs(oracle) > 1e-6)
                sign = projection.coords[i][comp] / oracle > 0.0 ? 1.0 : -1.0;
        }
        for (std::size_t i = 0; i < centered.size(); ++i) {
            double oracle = 0.0;
            for (int j = 0; j < 10; ++j) oracle += centered[i][j] * svd.right_vectors[comp][j];
            worst = std::max(worst, std::fabs(projection.coords[i][comp] - sign * oracle));
        }
    }
    char buf[80];
    std::snprintf(buf, sizeof(buf), "max coordinate deviation %.3e (bound 1e-8)", worst);
    detail = buf;
    return worst < 1e-8;
}

// ---------------------------------------------------------------------------
// criterion 8: determinism and serialization round-trip
// ---------------------------------------------------------------------------

std::string file_contents(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool criterion_determinism(std::string& detail) {
    namespace fs = std::filesystem;
    const fs::path dir = "acceptance_scratch";
    fs::remove_all(dir);
    fs::create_directories(dir);

    dbnt_test::TopicCorpusConfig corpus_config;
    corpus_config.n_docs = 80;
    corpus_config.n_classes = 2;
    corpus_config.vocab_size = 30;
    corpus_config.class_block = 10;
    corpus_config.min_len = 10;
    corpus_config.max_len = 40;
    corpus_config.seed = 5;
    const auto corpus = dbnt_test::make_topic_corpus(corpus_config);

    dbnt::TrainConfig pre_config;
    pre_config.epochs = 5;
    pre_config.batch_size = 25;
    pre_config.seed = 9;
    dbnt::FinetuneConfig ft_config;
    ft_config.epochs = 3;
    ft_config.batch_size = 50;
    ft_config.seed = 9;

    bool loaded_matches = true;
    auto run_once = [&](const std::string& tag) {
        const std::string dbn_path = (dir / ("dbn." + tag)).string();
        const std::string ae_path = (dir / ("ae." + tag)).string();
        const std::string codes_path = (dir / ("codes." + tag)).string();

        const auto dbn = dbnt::pretrain(corpus.docs, {30, 16, 8}, pre_config);
        dbnt::save_dbn(dbn_path, dbn);
        const auto reloaded = dbnt::load_dbn(dbn_path);
        const auto model = dbnt::finetune(reloaded, corpus.docs, ft_config, true);
        dbnt::save_autoencoder(ae_path, model);

        std::vector<dbnt::LatentCode> codes;
        for (const auto& doc : corpus.docs) codes.push_back(dbnt::encode(model, doc));
        dbnt::write_codes(codes_path, codes);

        // a loaded model must reproduce the in-memory encodings bitwise
        const auto loaded = dbnt::load_autoencoder(ae_path);
        for (std::size_t i = 0; i < corpus.docs.size(); ++i)
            if (dbnt::encode(loaded, corpus.docs[i]).values != codes[i].values)
                loaded_matches = false;
    };

    run_once("a");
    run_once("b");

    const bool dbn_same =
        file_contents((dir / "dbn.a").string()) == file_contents((dir / "dbn.b").string());
    const bool ae_same =
        file_contents((dir / "ae.a").string()) == file_contents((dir / "ae.b").string());
    const bool codes_same =
        file_contents((dir / "codes.a").string()) == file_contents((dir / "codes.b").string());
    fs::remove_all(dir);

    detail = std::string("stack file ") + (dbn_same ? "identical" : "DIFFERS") +
             ", autoencoder file " + (ae_same ? "identical" : "DIFFERS") + ", codes file " +
             (codes_same ? "identical" : "DIFFERS") + ", loaded encodings " +
             (loaded_matches ? "bitwise equal" : "DIFFER");
    return dbn_same && ae_same && codes_same && loaded_matches;
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string part;
            while (std::getline(ss, part, ',')) only.insert(std::stoi(part));
        }
    }

    std::vector<Criterion> criteria = {
        {1, "gradient oracle", criterion_gradient_oracle},
        {2, "replicated softmax CD fixed point", criterion_cd_fixed_point},
        {3, "latent codes beat raw input vectors", criterion_better_than_input},
        {4, "binary codes track real codes", criterion_binary_close_to_real},
        {5, "evaluator matches brute force", criterion_evaluator_oracle},
        {6, "conjugate gradient exactness", criterion_cg_exactness},
        {7, "PCA matches independent SVD", criterion_pca_oracle},
        {8, "determinism and serialization", criterion_determinism},
        {9, "noise hardens code activations", criterion_noise_hardening},
    };

    std::fprintf(stderr, "kernel backend: %s\n",
                 dbnt::kern::backend_name(dbnt::kern::active_backend()).c_str());

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (!only.empty() && only.count(criterion.id) == 0) continue;
        const auto start = Clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        std::printf("[%s] criterion %d: %s — %s (%.1fs)\n", ok ? "PASS" : "FAIL", criterion.id,
                    criterion.name.c_str(), detail.c_str(), elapsed);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
