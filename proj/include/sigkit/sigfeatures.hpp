#pragma once

#include "sigkit/seqdata.hpp"
#include "sigkit/tensoralg.hpp"

#include <string>
#include <vector>

namespace sigkit {

struct SignatureConfig {
    int trunc = 2;
    int order = 1;
    std::vector<Augmentation> augmentations;
    bool normalize_levels = false;

    // Throws ConfigError on trunc < 1 or order outside 1..trunc.
    void validate() const;
};

TruncatedTensorSeries signature(const Sequence& seq, const SignatureConfig& cfg);
std::vector<TruncatedTensorSeries> signature_stream(const Sequence& seq, const SignatureConfig& cfg);

// Direct enumeration over index tuples. Only for L <= 12 and M <= 4.
TruncatedTensorSeries signature_brute(const Sequence& seq, const SignatureConfig& cfg);

// Divides each level m >= 1 by its norm; levels below 1e-12 are left at zero.
void normalize_tensor_levels(TruncatedTensorSeries& t);

// One row per sequence, level-major flattening.
Eigen::MatrixXd signature_features(const SequenceBatch& batch, const SignatureConfig& cfg, int jobs = 1);

// Column names m{level}_{flatindex} for a level layout.
std::vector<std::string> level_column_names(const std::vector<std::size_t>& level_sizes);

} // namespace sigkit
