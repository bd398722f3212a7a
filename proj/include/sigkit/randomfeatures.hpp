#pragma once

#include "sigkit/seqdata.hpp"
#include "sigkit/sigkernels.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sigkit {

struct RandomFourierParams {
    int dim = 0;
    int rff_dim = 0;
    int levels = 0;
    bool phase_variant = false;
    std::uint64_t seed = 0;
    double sigma = 1.0;
    Eigen::VectorXd lengthscales;
    // omega[m-1] is d x rff_dim, one independent draw per level.
    std::vector<Eigen::MatrixXd> omega;
    // phase[m-1] has rff_dim entries in [0, 2pi); empty unless phase_variant.
    std::vector<Eigen::VectorXd> phase;

    // Output size of one rff() call.
    int feature_dim() const { return phase_variant ? rff_dim : 2 * rff_dim; }
};

RandomFourierParams sample_params(const StaticKernelSpec& spec, int d, int rff_dim, int M, std::uint64_t seed,
                                  bool phase_variant);

// Level m uses omega[m-1] (1-based level).
Eigen::VectorXd rff(const Eigen::VectorXd& x, const RandomFourierParams& params, int m);

// Per-level feature blocks; level 0 holds the constant.
struct LevelFeatures {
    std::vector<Eigen::MatrixXd> levels;

    Eigen::MatrixXd flatten() const;
    std::vector<std::size_t> level_sizes() const;
};

// Full tensor features: level m has feature_dim^m columns.
LevelFeatures rfsf(const SequenceBatch& batch, const RandomFourierParams& params, int M, int jobs = 1);

// rff_dim independent one-sample copies; level m has rff_dim * 2^m columns, copy-major.
LevelFeatures rfsf_dp(const SequenceBatch& batch, const RandomFourierParams& params, int M, int jobs = 1);

struct TRPProjection {
    int rff_dim = 0;
    std::uint64_t seed = 0;
    // proj[m-1] is feature_dim x rff_dim with standard normal entries.
    std::vector<Eigen::MatrixXd> proj;
};

TRPProjection sample_trp(int feature_dim, int rff_dim, int M, std::uint64_t seed);

// Projects a flat row-major degree-m tensor over R^F with proj[0..m-1].
Eigen::VectorXd trp_project(const Eigen::VectorXd& t, int m, const TRPProjection& proj);

// Level m has rff_dim columns; never builds tensors.
LevelFeatures rfsf_trp(const SequenceBatch& batch, const RandomFourierParams& params, const TRPProjection& proj,
                       int M, int jobs = 1);

struct DecaySpec {
    Eigen::VectorXd lambda;
    Eigen::VectorXd frac_orders;
    int window = 32;

    static DecaySpec uniform(int channels, double lambda, double q, int window);
};

// Rows are time, columns channels. Missing history counts as zero.
Eigen::MatrixXd frac_diff(const Eigen::MatrixXd& series, const Eigen::VectorXd& q, int window);
// w_k = binom(q, k) (-1)^k for k < window.
std::vector<double> frac_diff_weights(double q, int window);

// Streamed decayed features for one sequence: result[m-1] is (L+1) x rff_dim, row l for the prefix ending at l.
std::vector<Eigen::MatrixXd> rfdsf(const Sequence& seq, const RandomFourierParams& params, const DecaySpec& decay,
                                   int M, int jobs = 1);

// Same construction without decay, by direct in-place stepping.
std::vector<Eigen::MatrixXd> rfsf_stream(const Sequence& seq, const RandomFourierParams& params,
                                         const Eigen::VectorXd& frac_orders, int window, int M);

// Unit-normalizes each level (zero levels stay zero) and prepends the constant 1.
std::vector<Eigen::VectorXd> normalize_levels(const std::vector<Eigen::VectorXd>& levels);

void write_params(std::ostream& out, const RandomFourierParams& p);
RandomFourierParams read_params(std::istream& in, const std::string& source);

} // namespace sigkit
