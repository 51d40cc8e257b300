#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dbnt {

// Fixed, ordered token list. A token's index is its line position.
struct Vocabulary {
    std::vector<std::string> tokens;

    std::size_t size() const { return tokens.size(); }

    // token -> index lookup table
    std::unordered_map<std::string, std::uint32_t> index_map() const;
};

// Sparse bag-of-words vector. Entries are (token index, count) with strictly
// positive counts and strictly ascending indices; total is the document
// length (sum of counts).
struct BowDocument {
    std::string doc_id;
    std::string label;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> counts;
    std::uint64_t total = 0;
};

struct CorpusSplit {
    std::vector<BowDocument> train;
    std::vector<BowDocument> test;
    Vocabulary vocabulary;
};

// The target_size most frequent tokens over the whole corpus, ordered by
// descending count with lexicographic tie-break. Throws data_error on an
// empty corpus.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& tokenized_docs,
                            std::size_t target_size);

// Count in-vocabulary tokens; out-of-vocabulary tokens are dropped.
BowDocument vectorize(const std::vector<std::string>& tokens,
                      const std::unordered_map<std::string, std::uint32_t>& vocab_index,
                      std::string doc_id = {}, std::string label = {});

// Deterministic shuffle under seed, then a train set of ceil(fraction * n)
// documents. When any document carries a label the per-label train counts are
// apportioned by largest remainder so each label's proportion is preserved to
// within one document while the total stays exactly ceil(fraction * n).
CorpusSplit split_corpus(const std::vector<BowDocument>& docs, const Vocabulary& vocab,
                         double train_fraction, std::uint64_t seed);

// Dense count vector of length dim.
std::vector<double> to_dense(const BowDocument& doc, std::size_t dim);

// --- file formats -----------------------------------------------------------
// Vocabulary file: one token per line, 0-based line number = token index.
// Corpus file: per line `doc_id<TAB>label<TAB>idx:count idx:count ...`,
//   idx strictly ascending, count positive; the third field may be empty.
// Raw text file: per line `doc_id<TAB>label<TAB>whitespace-separated tokens`.

void write_vocabulary(const std::string& path, const Vocabulary& vocab);
Vocabulary read_vocabulary(const std::string& path);

void write_corpus(const std::string& path, const std::vector<BowDocument>& docs);
std::vector<BowDocument> read_corpus(const std::string& path);

struct RawDocument {
    std::string doc_id;
    std::string label;
    std::vector<std::string> tokens;
};

std::vector<RawDocument> read_raw_text(const std::string& path);

} // namespace dbnt
