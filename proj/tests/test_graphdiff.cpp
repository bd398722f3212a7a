#include "sigkit/errors.hpp"
#include "sigkit/graphdiff.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

using namespace sigkit;

namespace {

Graph path_graph() {
    Graph g;
    g.node_ids = {"1", "2"};
    g.features = Eigen::MatrixXd(2, 1);
    g.features << 0.0, 1.0;
    g.edges = {{0, 1, 1.0}, {1, 0, 1.0}};
    return g;
}

Graph random_graph(std::mt19937_64& rng, int n, int d, double p, bool weighted) {
    std::bernoulli_distribution coin(p);
    std::uniform_real_distribution<double> w(0.2, 3.0);
    std::normal_distribution<double> nd;
    Graph g;
    g.features.resize(n, d);
    for (int i = 0; i < n; ++i) {
        g.node_ids.push_back("n" + std::to_string(i));
        for (int c = 0; c < d; ++c) g.features(i, c) = nd(rng);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng)) {
                const double c = weighted ? w(rng) : 1.0;
                g.edges.push_back({i, j, c});
                g.edges.push_back({j, i, c});
            }
    return g;
}

WalkFeatureConfig random_config(std::mt19937_64& rng, int d, int k, int M, int nf) {
    WalkFeatureConfig cfg;
    cfg.walk_length = k;
    cfg.trunc = M;
    for (int j = 0; j < nf; ++j) cfg.functionals.push_back(testing_support::random_rank1(rng, d, M));
    return cfg;
}

double max_dev(const NodeFeatures& a, const NodeFeatures& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, (a[j] - b[j]).cwiseAbs().maxCoeff());
    return m;
}

} // namespace

TEST(TransitionMatrix, PathGraph) {
    Eigen::MatrixXd P = Eigen::MatrixXd(transition_matrix(path_graph()));
    Eigen::Matrix2d expect;
    expect << 0, 1, 1, 0;
    EXPECT_EQ(P, expect);
}

TEST(TransitionMatrix, WeightedTriangle) {
    Graph g;
    g.features = Eigen::MatrixXd::Zero(3, 1);
    g.edges = {{0, 1, 1.0}, {0, 2, 3.0}, {1, 0, 1.0}, {1, 2, 1.0}, {2, 0, 2.0}, {2, 1, 6.0}};
    Eigen::MatrixXd P = Eigen::MatrixXd(transition_matrix(g));
    Eigen::Matrix3d expect;
    expect << 0, 0.25, 0.75, 0.5, 0, 0.5, 0.25, 0.75, 0;
    EXPECT_LT((P - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(TransitionMatrix, IsolatedNodeRowIsZero) {
    Graph g;
    g.features = Eigen::MatrixXd::Zero(3, 1);
    g.edges = {{0, 1, 2.0}, {1, 0, 2.0}};
    Eigen::MatrixXd P = Eigen::MatrixXd(transition_matrix(g));
    EXPECT_TRUE(P.row(2).isZero());
    EXPECT_DOUBLE_EQ(P.row(0).sum(), 1.0);
}

TEST(TransitionMatrix, RejectsBadWeight) {
    Graph g = path_graph();
    g.edges[0].weight = 0.0;
    EXPECT_THROW(transition_matrix(g), InputError);
}

TEST(Hypoelliptic, PathGraphHandValue) {
    WalkFeatureConfig cfg;
    cfg.walk_length = 1;
    cfg.trunc = 1;
    auto ell = Rank1Element::zeros(1, 1, 1.0);
    ell.components[0][0](0) = 1.0;
    cfg.functionals = {ell};
    auto f = hypoelliptic_features(path_graph(), cfg);
    EXPECT_DOUBLE_EQ(f[0](0, 1), 1.0);
    EXPECT_DOUBLE_EQ(f[0](1, 1), -1.0);
    EXPECT_DOUBLE_EQ(f[0](0, 0), 1.0);
}

TEST(Hypoelliptic, TwoStepHandAlgebra) {
    // Only walk from node 1 is 1 -> 2 -> 1 with increments +1, -1.
    // Level 2 of exp(1) exp(-1) is 1/2 - 1 + 1/2 = 0, level 1 is 0.
    WalkFeatureConfig cfg;
    cfg.walk_length = 2;
    cfg.trunc = 2;
    auto ell = Rank1Element::zeros(1, 2, 1.0);
    ell.components[0][0](0) = 1.0;
    ell.components[1][0](0) = 1.0;
    ell.components[1][1](0) = 1.0;
    cfg.functionals = {ell};
    auto g = path_graph();
    auto f = hypoelliptic_features(g, cfg);
    auto o = walk_oracle(g, cfg);
    EXPECT_NEAR(f[0](0, 1), 0.0, 1e-15);
    EXPECT_NEAR(f[0](0, 2), 0.0, 1e-15);
    EXPECT_LT(max_dev(f, o), 1e-14);
}

TEST(Hypoelliptic, EqualFeaturesVanish) {
    std::mt19937_64 rng(60);
    auto g = random_graph(rng, 5, 2, 0.6, true);
    g.features.rowwise() = g.features.row(0);
    auto cfg = random_config(rng, 2, 3, 2, 2);
    auto f = hypoelliptic_features(g, cfg);
    for (const auto& v : f) EXPECT_LT(v.rightCols(2).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Hypoelliptic, MatchesOracle) {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 40; ++trial) {
        std::uniform_int_distribution<int> nd(1, 6), kd(1, 3), md(1, 2), dd(1, 2);
        const int n = nd(rng), d = dd(rng);
        auto g = random_graph(rng, n, d, 0.5, trial % 2 == 1);
        auto cfg = random_config(rng, d, kd(rng), md(rng), 2);
        cfg.zero_start = trial % 3 == 0;
        cfg.increments = trial % 5 != 0;
        auto f = hypoelliptic_features(g, cfg);
        auto o = walk_oracle(g, cfg);
        EXPECT_LT(max_dev(f, o), 1e-10) << "trial " << trial;
    }
}

TEST(Hypoelliptic, DirectedWithSinkMatchesOracle) {
    std::mt19937_64 rng(62);
    Graph g;
    g.features = Eigen::MatrixXd::Random(4, 2);
    g.edges = {{0, 1, 1.0}, {1, 2, 2.0}, {1, 3, 1.0}, {2, 0, 0.5}};
    auto cfg = random_config(rng, 2, 3, 2, 1);
    EXPECT_LT(max_dev(hypoelliptic_features(g, cfg), walk_oracle(g, cfg)), 1e-12);
    auto f = hypoelliptic_features(g, cfg);
    EXPECT_LT(f[0].row(3).tail(2).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Hypoelliptic, CustomCoefficientsMatchOracle) {
    std::mt19937_64 rng(63);
    auto g = random_graph(rng, 5, 2, 0.7, true);
    auto cfg = random_config(rng, 2, 2, 2, 1);
    cfg.coefficients = {1.0, 0.7, -0.3};
    EXPECT_LT(max_dev(hypoelliptic_features(g, cfg), walk_oracle(g, cfg)), 1e-10);
    cfg.coefficients = {1.0};
    EXPECT_THROW(hypoelliptic_features(g, cfg), ConfigError);
}

TEST(Hypoelliptic, ZeroLengthKeepsOnlyLevelZero) {
    std::mt19937_64 rng(64);
    auto g = random_graph(rng, 4, 1, 0.8, false);
    auto cfg = random_config(rng, 1, 0, 2, 1);
    auto f = hypoelliptic_features(g, cfg);
    EXPECT_TRUE(f[0].rightCols(2).isZero());
    EXPECT_TRUE((f[0].col(0).array() == cfg.functionals[0].scalar).all());
    EXPECT_LT(max_dev(f, walk_oracle(g, cfg)), 1e-15);
}

TEST(Hypoelliptic, RelabelingEquivariance) {
    std::mt19937_64 rng(65);
    const int n = 6;
    auto g = random_graph(rng, n, 2, 0.5, true);
    auto cfg = random_config(rng, 2, 3, 2, 2);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Graph h = g;
    for (int i = 0; i < n; ++i) h.features.row(perm[i]) = g.features.row(i);
    for (auto& e : h.edges) {
        e.src = perm[e.src];
        e.dst = perm[e.dst];
    }
    auto a = hypoelliptic_features(g, cfg), b = hypoelliptic_features(h, cfg);
    for (std::size_t j = 0; j < a.size(); ++j)
        for (int i = 0; i < n; ++i) EXPECT_LT((a[j].row(i) - b[j].row(perm[i])).cwiseAbs().maxCoeff(), 1e-12);
    auto pa = mean_pool(a), pb = mean_pool(b);
    for (std::size_t j = 0; j < pa.size(); ++j) EXPECT_LT((pa[j] - pb[j]).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Hypoelliptic, Homogeneity) {
    std::mt19937_64 rng(66);
    auto g = random_graph(rng, 5, 2, 0.6, true);
    auto cfg = random_config(rng, 2, 2, 3, 1);
    auto a = hypoelliptic_features(g, cfg);
    g.features *= 1.7;
    auto b = hypoelliptic_features(g, cfg);
    for (int m = 0; m <= 3; ++m)
        EXPECT_LT((b[0].col(m) - std::pow(1.7, m) * a[0].col(m)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Hypoelliptic, ParallelMatchesSequential) {
    std::mt19937_64 rng(67);
    auto g = random_graph(rng, 30, 3, 0.2, true);
    auto cfg = random_config(rng, 3, 4, 3, 6);
    auto a = hypoelliptic_features(g, cfg);
    cfg.jobs = 4;
    EXPECT_LE(max_dev(a, hypoelliptic_features(g, cfg)), 1e-12);
}

TEST(Hypoelliptic, ShapeErrors) {
    std::mt19937_64 rng(68);
    auto g = random_graph(rng, 3, 2, 1.0, false);
    auto cfg = random_config(rng, 3, 1, 2, 1);
    EXPECT_THROW(hypoelliptic_features(g, cfg), ShapeError);
    cfg.functionals.clear();
    EXPECT_THROW(hypoelliptic_features(g, cfg), ConfigError);
}

TEST(WalkOracle, Guard) {
    std::mt19937_64 rng(69);
    auto g = random_graph(rng, 9, 1, 0.5, false);
    auto cfg = random_config(rng, 1, 1, 1, 1);
    EXPECT_THROW(walk_oracle(g, cfg), CapacityError);
}

TEST(MeanPool, SingleNodeIdentity) {
    Eigen::MatrixXd v(1, 3);
    v << 1, 2, 3;
    auto p = mean_pool({v});
    EXPECT_EQ(p[0], v.row(0));
    EXPECT_THROW(mean_pool({Eigen::MatrixXd(0, 3)}), InputError);
}

TEST(ReadGraph, UndirectedExpansion) {
    std::istringstream nodes("node,c0\na,0\nb,1\nc,2\n"), edges("src,dst,weight\na,b,2\nb,c,1\n");
    auto g = read_graph(edges, nodes, true);
    EXPECT_EQ(g.num_nodes(), 3);
    EXPECT_EQ(g.edges.size(), 4u);
    Eigen::MatrixXd P = Eigen::MatrixXd(transition_matrix(g));
    EXPECT_NEAR(P(1, 0), 2.0 / 3.0, 1e-15);
}

TEST(ReadGraph, Errors) {
    {
        std::istringstream nodes("node,c0\na,0\n"), edges("src,dst\na,z\n");
        try {
            read_graph(edges, nodes, false);
            FAIL();
        } catch (const InputError& e) {
            EXPECT_NE(std::string(e.what()).find(":2:2"), std::string::npos) << e.what();
        }
    }
    {
        std::istringstream nodes("node,c0\na,0\nb,1\n"), edges("src,dst,weight\na,b,-1\n");
        EXPECT_THROW(read_graph(edges, nodes, false), InputError);
    }
    {
        std::istringstream nodes("node,c0\na,0\na,1\n"), edges("src,dst\n");
        EXPECT_THROW(read_graph(edges, nodes, false), InputError);
    }
    {
        std::istringstream nodes("id,c0\na,0\n"), edges("src,dst\n");
        EXPECT_THROW(read_graph(edges, nodes, false), InputError);
    }
}
