#pragma once

#include "sigkit/seqdata.hpp"
#include "sigkit/tensoralg.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sigkit {

struct LS2TWeights {
    enum class Variant { independent, recursive };
    Variant variant = Variant::independent;
    int width = 1;
    int trunc = 1;
    int dim = 1;
    // independent: z[m-1][k] is a (width x d) matrix holding z^j_{m,k+1} in row j.
    // recursive: z[m-1][0] holds z^j_m in row j.
    std::vector<std::vector<Eigen::MatrixXd>> z;

    void validate() const;
    // Rank-1 functional j as used by the oracle.
    Rank1Element functional(int j) const;
    // Independent weights whose functionals coincide with this recursive set.
    LS2TWeights tied_independent() const;
};

LS2TWeights::Variant parse_ls2t_variant(const std::string& s);
const char* ls2t_variant_name(LS2TWeights::Variant v);

// Centered uniform entries with variance 1/d, reproducible from seed.
LS2TWeights init_ls2t_weights(LS2TWeights::Variant v, int width, int M, int d, std::uint64_t seed);

// Y[m-1][i] is an (L x width) matrix: row l-1 is the value on the prefix ending at step l.
using LS2TOutput = std::vector<std::vector<Eigen::MatrixXd>>;

LS2TOutput ls2t_independent(const SequenceBatch& batch, const LS2TWeights& w, int jobs = 1);
LS2TOutput ls2t_recursive(const SequenceBatch& batch, const LS2TWeights& w, int jobs = 1);
LS2TOutput ls2t(const SequenceBatch& batch, const LS2TWeights& w, int jobs = 1);

// Per-level values <ell_m, level m of the order-1 signature>; index 0 is ell_0.
std::vector<double> rank1_oracle(const Sequence& seq, const Rank1Element& ell);

void write_ls2t_weights(std::ostream& out, const LS2TWeights& w);
LS2TWeights read_ls2t_weights(std::istream& in, const std::string& source);
LS2TWeights read_ls2t_weights_file(const std::string& path);

} // namespace sigkit
