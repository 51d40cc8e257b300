#pragma once

#include "dbnt/codes.hpp"
#include "dbnt/corpus.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace dbnt {

inline const std::vector<std::size_t> kDefaultNeighborCounts = {1, 3, 7, 15, 31, 63};

// Mean same-label fraction among each query's k nearest neighbors, averaged
// over all queries, for each k.
struct AccuracyCurve {
    std::vector<std::pair<std::size_t, double>> points;
    std::size_t n_queries = 0;
};

struct Projection2D {
    std::vector<std::array<double, 2>> coords; // one per input vector, in order
    std::array<double, 2> explained_variance = {0.0, 0.0};
};

// The k nearest pool entries to the query under the kind-matched metric
// (Euclidean for real codes, Hamming for binary), self excluded by doc_id,
// distance ties broken by ascending doc_id.
std::vector<std::string> knn(const LatentCode& query, const std::vector<LatentCode>& pool,
                             std::size_t k);

// Every code queries the rest of the pool; per-query fraction of the k
// nearest neighbors sharing the query label, averaged over queries.
AccuracyCurve accuracy_measurement(const std::vector<LatentCode>& codes,
                                   const std::vector<std::size_t>& ks);

// Mean-center, project onto the top two principal directions. Sign
// convention: each component's largest-magnitude loading is positive.
Projection2D pca_project(const std::vector<std::vector<double>>& vectors,
                         std::size_t out_dims = 2);

// Accuracy of raw count vectors under Euclidean distance. dim 0 means infer
// from the largest index present.
AccuracyCurve baseline_input_accuracy(const std::vector<BowDocument>& docs,
                                      const std::vector<std::size_t>& ks, std::size_t dim = 0);

// CSV `k,accuracy` preceded by `# key: value` comment lines.
void write_accuracy_csv(const std::string& path, const AccuracyCurve& curve,
                        const std::vector<std::pair<std::string, std::string>>& header);
std::string accuracy_csv(const AccuracyCurve& curve,
                         const std::vector<std::pair<std::string, std::string>>& header);

// CSV `doc_id,label,pc1,pc2`.
void write_pca_csv(const std::string& path, const std::vector<std::string>& doc_ids,
                   const std::vector<std::string>& labels, const Projection2D& projection);
std::string pca_csv(const std::vector<std::string>& doc_ids,
                    const std::vector<std::string>& labels, const Projection2D& projection);

} // namespace dbnt
