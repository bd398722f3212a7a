#pragma once

#include "sigkit/seqdata.hpp"
#include "sigkit/tensoralg.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace sigkit {

struct StaticKernelSpec {
    enum class Kind { linear, rbf };
    Kind kind = Kind::linear;
    double sigma = 1.0;
    // When set, sigma is resolved from data with the median heuristic.
    std::optional<double> alpha;
};

StaticKernelSpec::Kind parse_static_kind(const std::string& s);
const char* static_kind_name(StaticKernelSpec::Kind k);

struct GramConfig {
    int trunc = 2;
    int order = 1;
    StaticKernelSpec static_kernel;
    bool normalize = false;
    std::vector<Augmentation> augmentations;
    double cell_cap = 1e9;
    int jobs = 1;

    void validate() const;
};

struct GramResult {
    // levels[m] for m = 0..M; level 0 is all ones.
    std::vector<Eigen::MatrixXd> levels;
    Eigen::MatrixXd combined;
    double sigma = 0.0;
};

double static_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const StaticKernelSpec& spec);

// Static kernel between all states of x (rows) and y (columns).
Eigen::MatrixXd static_matrix(const Sequence& x, const Sequence& y, const StaticKernelSpec& spec);

// Per-level kernels K_1..K_M (index 0 holds 1) for one pair of already augmented sequences.
std::vector<double> signature_kernel_pair(const Sequence& x, const Sequence& y, int M, int p,
                                          const StaticKernelSpec& spec);

GramResult gram(const SequenceBatch& X, const SequenceBatch& Y, const GramConfig& cfg);

// Median of pairwise distances / 2 over pooled states, scaled by alpha.
double median_bandwidth(const SequenceBatch& X, double alpha);
double median_bandwidth(const SequenceBatch& X, const SequenceBatch& Y, double alpha);
std::vector<double> default_alpha_grid();

Eigen::MatrixXd inducing_gram(const std::vector<Rank1Element>& Z, const std::vector<double>& sigmas);

struct CrossGramConfig {
    std::vector<double> sigmas;
    StaticKernelSpec static_kernel;
    std::vector<Augmentation> augmentations;
};

// Rows index Z, columns index X.
Eigen::MatrixXd cross_gram(const std::vector<Rank1Element>& Z, const SequenceBatch& X,
                           const CrossGramConfig& cfg);

} // namespace sigkit
