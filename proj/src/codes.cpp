#include "dbnt/codes.hpp"

#include "dbnt/errors.hpp"
#include "dbnt/kernels.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace dbnt {

LatentCode encode(const AutoencoderModel& model, const BowDocument& doc) {
    if (doc.total == 0) throw data_error("degenerate document: " + doc.doc_id);
    LatentCode code;
    code.kind = CodeKind::real;
    code.doc_id = doc.doc_id;
    code.label = doc.label;

    std::vector<double> current = to_dense(doc, model.input_dim());
    std::vector<double> pre;
    for (std::size_t l = 0; l < model.encoder_depth; ++l) {
        const DenseLayer& layer = model.layers[l];
        const double scale = l == 0 ? static_cast<double>(doc.total) : 1.0;
        pre.assign(layer.out_dim(), 0.0);
        for (std::size_t j = 0; j < layer.out_dim(); ++j) pre[j] = scale * layer.bias[j];
        for (std::size_t i = 0; i < layer.in_dim(); ++i) {
            if (current[i] == 0.0) continue;
            kern::axpy(current[i], layer.weights.row(i), pre.data(), layer.out_dim());
        }
        current.resize(pre.size());
        kern::sigmoid(pre.data(), current.data(), pre.size());
    }
    code.values = std::move(current);
    return code;
}

LatentCode encode(const DbnModel& model, const BowDocument& doc) {
    const auto activations = up_pass(doc, model);
    LatentCode code;
    code.kind = CodeKind::real;
    code.doc_id = doc.doc_id;
    code.label = doc.label;
    code.values = activations.back();
    return code;
}

LatentCode binarize(const LatentCode& code, double threshold) {
    if (code.kind != CodeKind::real) throw std::invalid_argument("binarize expects a real code");
    LatentCode out;
    out.kind = CodeKind::binary;
    out.doc_id = code.doc_id;
    out.label = code.label;
    out.bits.reserve(code.values.size());
    for (double v : code.values) out.bits.push_back(v > threshold ? 1 : 0);
    return out;
}

double euclidean(const LatentCode& a, const LatentCode& b) {
    if (a.kind != CodeKind::real || b.kind != CodeKind::real)
        throw std::invalid_argument("euclidean distance expects real codes");
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("code dimension mismatch");
    return std::sqrt(kern::sqdist(a.values.data(), b.values.data(), a.values.size()));
}

std::uint64_t hamming(const LatentCode& a, const LatentCode& b) {
    if (a.kind != CodeKind::binary || b.kind != CodeKind::binary)
        throw std::invalid_argument("hamming distance expects binary codes");
    if (a.bits.size() != b.bits.size()) throw std::invalid_argument("code dimension mismatch");
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) count += a.bits[i] != b.bits[i];
    return count;
}

namespace {

void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

} // namespace

void write_codes(const std::string& path, const std::vector<LatentCode>& codes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot open for writing: " + path);
    std::string line;
    for (const auto& code : codes) {
        line.clear();
        line += code.doc_id;
        line += '\t';
        line += code.label;
        line += '\t';
        if (code.kind == CodeKind::real) {
            for (std::size_t i = 0; i < code.values.size(); ++i) {
                if (i > 0) line += ',';
                append_double(line, code.values[i]);
            }
        } else {
            for (std::uint8_t bit : code.bits) line += bit ? '1' : '0';
        }
        line += '\n';
        out << line;
    }
}

std::vector<LatentCode> read_codes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open: " + path);
    std::vector<LatentCode> codes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fail = [&](const std::string& what) -> void {
            throw data_error(path + ":" + std::to_string(line_no) + ": " + what);
        };
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) fail("expected doc_id<TAB>label<TAB>code");

        LatentCode code;
        code.doc_id = line.substr(0, tab1);
        code.label = line.substr(tab1 + 1, tab2 - tab1 - 1);
        const std::string payload = line.substr(tab2 + 1);
        if (payload.empty()) fail("empty code");

        const bool binary = payload.find_first_not_of("01") == std::string::npos &&
                            payload.find(',') == std::string::npos;
        if (binary) {
            code.kind = CodeKind::binary;
            for (char c : payload) code.bits.push_back(c == '1' ? 1 : 0);
        } else {
            code.kind = CodeKind::real;
            const char* p = payload.data();
            const char* end = payload.data() + payload.size();
            while (p < end) {
                double v = 0.0;
                const auto res = std::from_chars(p, end, v);
                if (res.ec != std::errc{}) fail("malformed real value");
                code.values.push_back(v);
                p = res.ptr;
                if (p < end) {
                    if (*p != ',') fail("expected comma between values");
                    ++p;
                }
            }
        }
        if (!codes.empty() &&
            (codes.front().kind != code.kind || codes.front().dim() != code.dim()))
            fail("inconsistent code kind or dimension");
        codes.push_back(std::move(code));
    }
    return codes;
}

} // namespace dbnt
