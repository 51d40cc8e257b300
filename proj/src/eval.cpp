#include "dbnt/eval.hpp"

#include "dbnt/errors.hpp"
#include "dbnt/kernels.hpp"
#include "dbnt/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace dbnt {

namespace {

double code_distance(const LatentCode& a, const LatentCode& b) {
    return a.kind == CodeKind::real ? euclidean(a, b) : static_cast<double>(hamming(a, b));
}

struct Neighbor {
    double dist;
    const LatentCode* code;
};

// all pool entries except the query, ordered by (distance, doc_id)
std::vector<Neighbor> ranked_neighbors(const LatentCode& query,
                                       const std::vector<LatentCode>& pool) {
    std::vector<Neighbor> neighbors;
    neighbors.reserve(pool.size());
    for (const auto& candidate : pool) {
        if (candidate.doc_id == query.doc_id) continue;
        neighbors.push_back({code_distance(query, candidate), &candidate});
    }
    std::sort(neighbors.begin(), neighbors.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        return a.code->doc_id < b.code->doc_id;
    });
    return neighbors;
}

void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

} // namespace

std::vector<std::string> knn(const LatentCode& query, const std::vector<LatentCode>& pool,
                             std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be positive");
    const auto neighbors = ranked_neighbors(query, pool);
    if (k > neighbors.size())
        throw std::invalid_argument("k exceeds the number of available neighbors");
    std::vector<std::string> ids;
    ids.reserve(k);
    for (std::size_t i = 0; i < k; ++i) ids.push_back(neighbors[i].code->doc_id);
    return ids;
}

AccuracyCurve accuracy_measurement(const std::vector<LatentCode>& codes,
                                   const std::vector<std::size_t>& ks) {
    if (ks.empty()) throw std::invalid_argument("no neighbor counts given");
    std::size_t max_k = 0;
    for (std::size_t k : ks) {
        if (k == 0) throw std::invalid_argument("neighbor counts must be positive");
        max_k = std::max(max_k, k);
    }
    if (codes.size() < max_k + 1)
        throw std::invalid_argument("need at least max(ks)+1 codes");
    for (const auto& code : codes)
        if (code.label.empty()) throw data_error("unlabeled code: " + code.doc_id);

    std::vector<double> sums(ks.size(), 0.0);
    for (const auto& query : codes) {
        const auto neighbors = ranked_neighbors(query, codes);
        // same-label prefix counts cover every k at once
        std::size_t same = 0;
        std::size_t pos = 0;
        std::vector<std::size_t> same_at(max_k + 1, 0);
        for (; pos < max_k; ++pos) {
            if (neighbors[pos].code->label == query.label) ++same;
            same_at[pos + 1] = same;
        }
        for (std::size_t i = 0; i < ks.size(); ++i)
            sums[i] += static_cast<double>(same_at[ks[i]]) / static_cast<double>(ks[i]);
    }

    AccuracyCurve curve;
    curve.n_queries = codes.size();
    for (std::size_t i = 0; i < ks.size(); ++i)
        curve.points.emplace_back(ks[i], sums[i] / static_cast<double>(codes.size()));
    return curve;
}

namespace {

// Top-r eigenpairs of a symmetric PSD matrix by subspace iteration with a
// deterministic start. Rank-deficient columns come back as zero vectors.
void top_eigenpairs(const Matrix& sym, std::size_t r, std::vector<std::vector<double>>& vecs,
                    std::vector<double>& vals) {
    const std::size_t s = sym.rows();
    vecs.assign(r, std::vector<double>(s, 0.0));
    vals.assign(r, 0.0);

    Rng rng(0x70636131u);
    std::vector<std::vector<double>> q(r, std::vector<double>(s));
    for (auto& col : q)
        for (double& v : col) v = rng.normal();

    auto orthonormalize = [&](std::vector<std::vector<double>>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                const double proj = kern::dot(cols[i].data(), cols[j].data(), s);
                kern::axpy(-proj, cols[j].data(), cols[i].data(), s);
            }
            const double norm = std::sqrt(kern::dot(cols[i].data(), cols[i].data(), s));
            if (norm < 1e-150) {
                std::fill(cols[i].begin(), cols[i].end(), 0.0);
            } else {
                kern::scal(1.0 / norm, cols[i].data(), s);
            }
        }
    };
    orthonormalize(q);

    // Iterate until the Rayleigh residual of every column is negligible
    // relative to the dominant eigenvalue (a successive-iterate test stops
    // too early when eigenvalues are close).
    std::vector<std::vector<double>> z(r, std::vector<double>(s));
    std::vector<double> rayleigh(r, 0.0);
    for (std::size_t iter = 0; iter < 5000; ++iter) {
        double lambda_max = 0.0;
        double worst_residual = 0.0;
        for (std::size_t c = 0; c < r; ++c) {
            for (std::size_t i = 0; i < s; ++i)
                z[c][i] = kern::dot(sym.row(i), q[c].data(), s);
            rayleigh[c] = kern::dot(q[c].data(), z[c].data(), s);
            lambda_max = std::max(lambda_max, std::fabs(rayleigh[c]));
            double residual = 0.0;
            for (std::size_t i = 0; i < s; ++i) {
                const double rr = z[c][i] - rayleigh[c] * q[c][i];
                residual += rr * rr;
            }
            worst_residual = std::max(worst_residual, std::sqrt(residual));
        }
        if (worst_residual <= 1e-13 * std::max(lambda_max, 1e-300)) break;
        orthonormalize(z);
        std::swap(q, z);
    }

    for (std::size_t c = 0; c < r; ++c) {
        vals[c] = rayleigh[c];
        vecs[c] = q[c];
    }
    // order by eigenvalue, largest first
    if (r == 2 && vals[1] > vals[0]) {
        std::swap(vals[0], vals[1]);
        std::swap(vecs[0], vecs[1]);
    }
}

} // namespace

Projection2D pca_project(const std::vector<std::vector<double>>& vectors, std::size_t out_dims) {
    if (out_dims != 2) throw std::invalid_argument("only two output components are supported");
    if (vectors.size() < 2) throw std::invalid_argument("need at least two vectors");
    const std::size_t n = vectors.size();
    const std::size_t d = vectors.front().size();
    if (d == 0) throw std::invalid_argument("zero-dimensional vectors");
    for (const auto& v : vectors)
        if (v.size() != d) throw std::invalid_argument("inconsistent vector dimensions");

    std::vector<double> mean(d, 0.0);
    for (const auto& v : vectors) kern::axpy(1.0, v.data(), mean.data(), d);
    kern::scal(1.0 / static_cast<double>(n), mean.data(), d);

    Matrix centered(n, d);
    double total_ss = 0.0;
    double reference = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double* row = centered.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            row[j] = vectors[i][j] - mean[j];
            total_ss += row[j] * row[j];
            reference += vectors[i][j] * vectors[i][j];
        }
    }
    if (total_ss <= 1e-20 * std::max(reference, 1e-300)) throw data_error("zero variance");

    const std::size_t r = std::min<std::size_t>(2, std::min(n, d));
    std::vector<std::vector<double>> dirs(2, std::vector<double>(d, 0.0));
    std::array<double, 2> lambda = {0.0, 0.0};

    if (d <= n) {
        Matrix scatter(d, d);
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = centered.row(i);
            for (std::size_t a = 0; a < d; ++a) {
                if (row[a] == 0.0) continue;
                kern::axpy(row[a], row, scatter.row(a), d);
            }
        }
        std::vector<std::vector<double>> vecs;
        std::vector<double> vals;
        top_eigenpairs(scatter, r, vecs, vals);
        for (std::size_t c = 0; c < r; ++c) {
            dirs[c] = vecs[c];
            lambda[c] = vals[c];
        }
    } else {
        // Gram route for wide data: eigenvectors w of X Xt give directions
        // Xt w / sqrt(lambda)
        Matrix gram(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                gram(i, j) = kern::dot(centered.row(i), centered.row(j), d);
        std::vector<std::vector<double>> vecs;
        std::vector<double> vals;
        top_eigenpairs(gram, r, vecs, vals);
        for (std::size_t c = 0; c < r; ++c) {
            lambda[c] = vals[c];
            if (vals[c] <= 0.0) continue;
            for (std::size_t i = 0; i < n; ++i)
                kern::axpy(vecs[c][i], centered.row(i), dirs[c].data(), d);
            const double norm = std::sqrt(kern::dot(dirs[c].data(), dirs[c].data(), d));
            if (norm > 0.0) kern::scal(1.0 / norm, dirs[c].data(), d);
        }
    }

    // sign convention: the largest-magnitude loading of each component is positive
    for (std::size_t c = 0; c < 2; ++c) {
        std::size_t arg = 0;
        for (std::size_t j = 1; j < d; ++j)
            if (std::fabs(dirs[c][j]) > std::fabs(dirs[c][arg])) arg = j;
        if (dirs[c][arg] < 0.0) kern::scal(-1.0, dirs[c].data(), d);
    }

    Projection2D projection;
    projection.coords.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        projection.coords[i][0] = kern::dot(centered.row(i), dirs[0].data(), d);
        projection.coords[i][1] = kern::dot(centered.row(i), dirs[1].data(), d);
    }
    projection.explained_variance = {std::max(0.0, lambda[0]) / total_ss,
                                     std::max(0.0, lambda[1]) / total_ss};
    return projection;
}

AccuracyCurve baseline_input_accuracy(const std::vector<BowDocument>& docs,
                                      const std::vector<std::size_t>& ks, std::size_t dim) {
    if (dim == 0) {
        for (const auto& doc : docs)
            for (const auto& [idx, count] : doc.counts)
                dim = std::max<std::size_t>(dim, idx + 1);
        if (dim == 0) dim = 1;
    }
    std::vector<LatentCode> codes;
    codes.reserve(docs.size());
    for (const auto& doc : docs) {
        LatentCode code;
        code.kind = CodeKind::real;
        code.doc_id = doc.doc_id;
        code.label = doc.label;
        code.values = to_dense(doc, dim);
        codes.push_back(std::move(code));
    }
    return accuracy_measurement(codes, ks);
}

std::string accuracy_csv(const AccuracyCurve& curve,
                         const std::vector<std::pair<std::string, std::string>>& header) {
    std::string out;
    for (const auto& [key, value] : header) out += "# " + key + ": " + value + "\n";
    out += "# n_queries: " + std::to_string(curve.n_queries) + "\n";
    out += "k,accuracy\n";
    for (const auto& [k, acc] : curve.points) {
        out += std::to_string(k);
        out += ',';
        append_double(out, acc);
        out += '\n';
    }
    return out;
}

void write_accuracy_csv(const std::string& path, const AccuracyCurve& curve,
                        const std::vector<std::pair<std::string, std::string>>& header) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot open for writing: " + path);
    out << accuracy_csv(curve, header);
}

std::string pca_csv(const std::vector<std::string>& doc_ids,
                    const std::vector<std::string>& labels, const Projection2D& projection) {
    if (doc_ids.size() != projection.coords.size() || labels.size() != doc_ids.size())
        throw std::invalid_argument("doc_id/label/coordinate count mismatch");
    std::string out = "doc_id,label,pc1,pc2\n";
    for (std::size_t i = 0; i < doc_ids.size(); ++i) {
        out += doc_ids[i];
        out += ',';
        out += labels[i];
        out += ',';
        append_double(out, projection.coords[i][0]);
        out += ',';
        append_double(out, projection.coords[i][1]);
        out += '\n';
    }
    return out;
}

void write_pca_csv(const std::string& path, const std::vector<std::string>& doc_ids,
                   const std::vector<std::string>& labels, const Projection2D& projection) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot open for writing: " + path);
    out << pca_csv(doc_ids, labels, projection);
}

} // namespace dbnt
