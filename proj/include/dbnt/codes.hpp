#pragma once

#include "dbnt/autoencoder.hpp"
#include "dbnt/corpus.hpp"
#include "dbnt/dbn.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dbnt {

enum class CodeKind { real, binary };

// Latent representation of one document. Real codes hold sigmoid activations
// in (0,1); binary codes hold thresholded bits.
struct LatentCode {
    CodeKind kind = CodeKind::real;
    std::vector<double> values;      // real kind
    std::vector<std::uint8_t> bits;  // binary kind, entries 0/1
    std::string doc_id;
    std::string label;

    std::size_t dim() const { return kind == CodeKind::real ? values.size() : bits.size(); }
};

// Encoder-half pass with noise disabled (noise is a training-time device).
LatentCode encode(const AutoencoderModel& model, const BowDocument& doc);
// Code of a pretrained stack alone: the top-layer activations of up_pass.
LatentCode encode(const DbnModel& model, const BowDocument& doc);

// bit j = 1 iff values[j] > threshold (strict).
LatentCode binarize(const LatentCode& code, double threshold = 0.1);

double euclidean(const LatentCode& a, const LatentCode& b);
std::uint64_t hamming(const LatentCode& a, const LatentCode& b);

// Codes file: one per line, `doc_id<TAB>label<TAB>payload`; the payload is
// comma-separated shortest round-trip decimals for real codes or a 0/1
// string for binary codes.
void write_codes(const std::string& path, const std::vector<LatentCode>& codes);
std::vector<LatentCode> read_codes(const std::string& path);

} // namespace dbnt
