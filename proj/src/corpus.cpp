#include "dbnt/corpus.hpp"

#include "dbnt/errors.hpp"
#include "dbnt/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace dbnt {

std::unordered_map<std::string, std::uint32_t> Vocabulary::index_map() const {
    std::unordered_map<std::string, std::uint32_t> m;
    m.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) m.emplace(tokens[i], static_cast<std::uint32_t>(i));
    return m;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& tokenized_docs,
                            std::size_t target_size) {
    if (target_size == 0) throw config_error("vocabulary size must be positive");
    std::map<std::string, std::uint64_t> freq;
    for (const auto& doc : tokenized_docs)
        for (const auto& tok : doc) ++freq[tok];
    if (freq.empty()) throw data_error("empty corpus");

    std::vector<std::pair<std::string, std::uint64_t>> items(freq.begin(), freq.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary vocab;
    const std::size_t n = std::min(target_size, items.size());
    vocab.tokens.reserve(n);
    for (std::size_t i = 0; i < n; ++i) vocab.tokens.push_back(items[i].first);
    return vocab;
}

BowDocument vectorize(const std::vector<std::string>& tokens,
                      const std::unordered_map<std::string, std::uint32_t>& vocab_index,
                      std::string doc_id, std::string label) {
    BowDocument doc;
    doc.doc_id = std::move(doc_id);
    doc.label = std::move(label);
    std::map<std::uint32_t, std::uint32_t> counts;
    for (const auto& tok : tokens) {
        auto it = vocab_index.find(tok);
        if (it == vocab_index.end()) continue;
        ++counts[it->second];
        ++doc.total;
    }
    doc.counts.assign(counts.begin(), counts.end());
    return doc;
}

CorpusSplit split_corpus(const std::vector<BowDocument>& docs, const Vocabulary& vocab,
                         double train_fraction, std::uint64_t seed) {
    if (docs.empty()) throw data_error("empty corpus");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw config_error("train fraction must lie in (0,1)");
    {
        std::unordered_map<std::string, int> seen;
        for (const auto& d : docs)
            if (++seen[d.doc_id] > 1) throw data_error("duplicate doc_id: " + d.doc_id);
    }

    const std::size_t n = docs.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.below(i + 1)]);

    const std::size_t train_total =
        static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n)));

    bool labeled = false;
    for (const auto& d : docs)
        if (!d.label.empty()) { labeled = true; break; }

    CorpusSplit split;
    split.vocabulary = vocab;

    if (!labeled) {
        for (std::size_t i = 0; i < n; ++i)
            (i < train_total ? split.train : split.test).push_back(docs[order[i]]);
        return split;
    }

    // Largest-remainder apportionment of train_total over labels.
    std::map<std::string, std::size_t> label_count;
    for (const auto& d : docs) ++label_count[d.label];
    std::map<std::string, std::size_t> quota;
    std::vector<std::pair<double, std::string>> remainders;
    std::size_t assigned = 0;
    for (const auto& [label, count] : label_count) {
        const double share =
            static_cast<double>(train_total) * static_cast<double>(count) / static_cast<double>(n);
        const auto base = static_cast<std::size_t>(std::floor(share));
        quota[label] = std::min(base, count);
        assigned += quota[label];
        remainders.emplace_back(share - std::floor(share), label);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; assigned < train_total; i = (i + 1) % remainders.size()) {
        auto& q = quota[remainders[i].second];
        if (q < label_count[remainders[i].second]) {
            ++q;
            ++assigned;
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        const BowDocument& d = docs[order[i]];
        auto& q = quota[d.label];
        if (q > 0) {
            --q;
            split.train.push_back(d);
        } else {
            split.test.push_back(d);
        }
    }
    return split;
}

std::vector<double> to_dense(const BowDocument& doc, std::size_t dim) {
    std::vector<double> v(dim, 0.0);
    for (const auto& [idx, count] : doc.counts) {
        if (idx >= dim) throw data_error("token index out of range in document " + doc.doc_id);
        v[idx] = static_cast<double>(count);
    }
    return v;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open: " + path);
    return in;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no, const std::string& what) {
    throw data_error(path + ":" + std::to_string(line_no) + ": " + what);
}

} // namespace

void write_vocabulary(const std::string& path, const Vocabulary& vocab) {
    auto out = open_out(path);
    for (const auto& tok : vocab.tokens) out << tok << '\n';
}

Vocabulary read_vocabulary(const std::string& path) {
    auto in = open_in(path);
    Vocabulary vocab;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) parse_fail(path, line_no, "empty token");
        vocab.tokens.push_back(line);
    }
    if (vocab.tokens.empty()) throw data_error("empty vocabulary file: " + path);
    return vocab;
}

void write_corpus(const std::string& path, const std::vector<BowDocument>& docs) {
    auto out = open_out(path);
    for (const auto& d : docs) {
        out << d.doc_id << '\t' << d.label << '\t';
        for (std::size_t i = 0; i < d.counts.size(); ++i) {
            if (i > 0) out << ' ';
            out << d.counts[i].first << ':' << d.counts[i].second;
        }
        out << '\n';
    }
}

std::vector<BowDocument> read_corpus(const std::string& path) {
    auto in = open_in(path);
    std::vector<BowDocument> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tab1 = line.find('\t');
        if (tab1 == std::string::npos) parse_fail(path, line_no, "expected doc_id<TAB>label<TAB>counts");
        const auto tab2 = line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) parse_fail(path, line_no, "expected doc_id<TAB>label<TAB>counts");

        BowDocument doc;
        doc.doc_id = line.substr(0, tab1);
        doc.label = line.substr(tab1 + 1, tab2 - tab1 - 1);
        if (doc.doc_id.empty()) parse_fail(path, line_no, "empty doc_id");

        std::int64_t prev_idx = -1;
        std::istringstream fields(line.substr(tab2 + 1));
        std::string field;
        while (fields >> field) {
            const auto colon = field.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 == field.size())
                parse_fail(path, line_no, "malformed idx:count entry '" + field + "'");
            std::uint32_t idx = 0, count = 0;
            auto r1 = std::from_chars(field.data(), field.data() + colon, idx);
            auto r2 = std::from_chars(field.data() + colon + 1, field.data() + field.size(), count);
            if (r1.ec != std::errc{} || r1.ptr != field.data() + colon || r2.ec != std::errc{} ||
                r2.ptr != field.data() + field.size())
                parse_fail(path, line_no, "malformed idx:count entry '" + field + "'");
            if (count == 0) parse_fail(path, line_no, "zero count");
            if (static_cast<std::int64_t>(idx) <= prev_idx)
                parse_fail(path, line_no, "indices must be strictly ascending");
            prev_idx = idx;
            doc.counts.emplace_back(idx, count);
            doc.total += count;
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

std::vector<RawDocument> read_raw_text(const std::string& path) {
    auto in = open_in(path);
    std::vector<RawDocument> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tab1 = line.find('\t');
        if (tab1 == std::string::npos) parse_fail(path, line_no, "expected doc_id<TAB>label<TAB>tokens");
        const auto tab2 = line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) parse_fail(path, line_no, "expected doc_id<TAB>label<TAB>tokens");

        RawDocument doc;
        doc.doc_id = line.substr(0, tab1);
        doc.label = line.substr(tab1 + 1, tab2 - tab1 - 1);
        if (doc.doc_id.empty()) parse_fail(path, line_no, "empty doc_id");
        std::istringstream toks(line.substr(tab2 + 1));
        std::string tok;
        while (toks >> tok) doc.tokens.push_back(tok);
        docs.push_back(std::move(doc));
    }
    return docs;
}

} // namespace dbnt
