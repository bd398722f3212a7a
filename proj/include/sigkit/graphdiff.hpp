#pragma once

#include "sigkit/tensoralg.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <string>
#include <vector>

namespace sigkit {

struct Edge {
    int src = 0;
    int dst = 0;
    double weight = 1.0;
};

struct Graph {
    std::vector<std::string> node_ids;
    std::vector<Edge> edges;
    // n x d, one row per node.
    Eigen::MatrixXd features;

    int num_nodes() const { return static_cast<int>(features.rows()); }
    int dim() const { return static_cast<int>(features.cols()); }
    // Throws on out-of-range endpoints or nonpositive weights.
    void validate() const;
};

struct WalkFeatureConfig {
    int walk_length = 1;
    int trunc = 2;
    std::vector<Rank1Element> functionals;
    bool zero_start = false;
    bool increments = true;
    // Per-level coefficients c_0..c_M of the step lift; empty means 1/r!.
    std::vector<double> coefficients;
    int jobs = 1;
};

// Row-stochastic; nodes without out-edges keep an all-zero row.
Eigen::SparseMatrix<double, Eigen::RowMajor> transition_matrix(const Graph& g);

// result[j] is n x (M+1) for functional j; column m is f_{k,m}.
using NodeFeatures = std::vector<Eigen::MatrixXd>;

NodeFeatures hypoelliptic_features(const Graph& g, const WalkFeatureConfig& cfg);
// Enumerates every walk. Only for n <= 8 and k <= 4.
NodeFeatures walk_oracle(const Graph& g, const WalkFeatureConfig& cfg);

// result[j] is a row vector of length M+1.
std::vector<Eigen::RowVectorXd> mean_pool(const NodeFeatures& values);

Graph read_graph(const std::string& edge_path, const std::string& node_path, bool undirected);
Graph read_graph(std::istream& edges, std::istream& nodes, bool undirected);

} // namespace sigkit
