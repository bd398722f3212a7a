#include "sigkit/errors.hpp"
#include "sigkit/lowrank.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace sigkit;

namespace {

LS2TWeights random_weights(std::mt19937_64& rng, LS2TWeights::Variant v, int width, int M, int d) {
    return init_ls2t_weights(v, width, M, d, rng());
}

} // namespace

TEST(LS2T, LevelOneIsLinear) {
    std::mt19937_64 rng(31);
    auto b = testing_support::random_batch(rng, 3, 6, 2);
    auto w = random_weights(rng, LS2TWeights::Variant::independent, 3, 1, 2);
    auto Y = ls2t_independent(b, w);
    auto t = tabulate(b);
    for (std::size_t i = 0; i < b.size(); ++i) {
        auto dx = increments(t.sequences[i]);
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(3);
        for (Eigen::Index l = 0; l < dx.rows(); ++l) {
            acc += dx.row(l) * w.z[0][0].transpose();
            EXPECT_LT((Y[0][i].row(l) - acc).cwiseAbs().maxCoeff(), 1e-13);
        }
    }
}

TEST(LS2T, IndependentMatchesOracle) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 15; ++trial) {
        const int d = 1 + trial % 3, M = 1 + trial % 3, width = 1 + trial % 4;
        auto b = testing_support::random_batch(rng, 2, 8, d);
        auto w = random_weights(rng, LS2TWeights::Variant::independent, width, M, d);
        auto Y = ls2t_independent(b, w);
        auto t = tabulate(b);
        for (std::size_t i = 0; i < b.size(); ++i) {
            const int L = t.sequences[i].length();
            for (int l = 1; l <= L; ++l) {
                Sequence prefix(Eigen::MatrixXd(t.sequences[i].values().topRows(l + 1)));
                for (int j = 0; j < width; ++j) {
                    auto o = rank1_oracle(prefix, w.functional(j));
                    for (int m = 1; m <= M; ++m) EXPECT_NEAR(Y[m - 1][i](l - 1, j), o[m], 1e-8);
                }
            }
        }
    }
}

TEST(LS2T, RecursiveMatchesOracleAndTiedIndependent) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 1 + trial % 3, M = 1 + trial % 4, width = 2;
        auto b = testing_support::random_batch(rng, 3, 8, d);
        auto w = random_weights(rng, LS2TWeights::Variant::recursive, width, M, d);
        auto Y = ls2t_recursive(b, w);
        auto Yi = ls2t_independent(b, w.tied_independent());
        auto t = tabulate(b);
        for (std::size_t i = 0; i < b.size(); ++i) {
            for (int m = 1; m <= M; ++m) EXPECT_LE((Y[m - 1][i] - Yi[m - 1][i]).cwiseAbs().maxCoeff(), 1e-12);
            const int L = t.sequences[i].length();
            if (L == 0) continue;
            for (int j = 0; j < width; ++j) {
                auto o = rank1_oracle(t.sequences[i], w.functional(j));
                for (int m = 1; m <= M; ++m) EXPECT_NEAR(Y[m - 1][i](L - 1, j), o[m], 1e-8);
            }
        }
    }
}

TEST(LS2T, FirstStepUsesOnlyFirstIncrement) {
    auto b = make_batch({Sequence{{0}, {2}, {5}}});
    auto w = init_ls2t_weights(LS2TWeights::Variant::recursive, 1, 2, 1, 7);
    w.z[0][0](0, 0) = 1.0;
    w.z[1][0](0, 0) = 1.0;
    auto Y = ls2t_recursive(b, w);
    EXPECT_DOUBLE_EQ(Y[0][0](0, 0), 2.0);
    EXPECT_DOUBLE_EQ(Y[1][0](0, 0), 0.0);
    EXPECT_DOUBLE_EQ(Y[1][0](1, 0), 6.0);
}

TEST(LS2T, ConstantSequenceGivesZeros) {
    auto b = make_batch({Sequence{{1, 1}, {1, 1}, {1, 1}}});
    auto w = init_ls2t_weights(LS2TWeights::Variant::independent, 3, 3, 2, 1);
    for (const auto& level : ls2t_independent(b, w)) EXPECT_TRUE(level[0].isZero());
}

TEST(LS2T, MultilinearInWeights) {
    std::mt19937_64 rng(34);
    auto b = testing_support::random_batch(rng, 2, 5, 2);
    auto w = random_weights(rng, LS2TWeights::Variant::independent, 2, 3, 2);
    auto Y = ls2t_independent(b, w);
    auto w2 = w;
    w2.z[2][1] *= 2.0;
    auto Y2 = ls2t_independent(b, w2);
    for (std::size_t i = 0; i < b.size(); ++i) {
        EXPECT_LT((Y2[2][i] - 2.0 * Y[2][i]).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_EQ(Y2[1][i], Y[1][i]);
    }
}

TEST(LS2T, StreamingDependsOnlyOnPrefix) {
    std::mt19937_64 rng(35);
    auto x = testing_support::random_sequence(rng, 8, 2);
    Eigen::MatrixXd v = x.values();
    v.row(8) << 100, -100;
    auto w = random_weights(rng, LS2TWeights::Variant::recursive, 2, 3, 2);
    auto a = ls2t_recursive(make_batch({x}), w), c = ls2t_recursive(make_batch({Sequence(v)}), w);
    for (int m = 0; m < 3; ++m) EXPECT_EQ(a[m][0].topRows(7), c[m][0].topRows(7));
}

TEST(LS2T, ParallelScanMatches) {
    std::mt19937_64 rng(36);
    auto b = make_batch({testing_support::random_sequence(rng, 300, 3)});
    auto w = random_weights(rng, LS2TWeights::Variant::independent, 4, 3, 3);
    auto a = ls2t_independent(b, w, 1), c = ls2t_independent(b, w, 4);
    for (int m = 0; m < 3; ++m) EXPECT_LE((a[m][0] - c[m][0]).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LS2T, VariantAndShapeChecks) {
    auto w = init_ls2t_weights(LS2TWeights::Variant::independent, 2, 2, 2, 1);
    auto b = make_batch({Sequence{{0}, {1}}});
    EXPECT_THROW(ls2t_independent(b, w), ShapeError);
    EXPECT_THROW(ls2t_recursive(make_batch({Sequence{{0, 0}, {1, 1}}}), w), ConfigError);
}

TEST(Rank1Oracle, ScalarOnlyAndClosedForm) {
    auto ell = Rank1Element::zeros(2, 2, 3.0);
    auto o = rank1_oracle(Sequence{{0, 0}, {1, 2}, {3, 1}}, ell);
    EXPECT_EQ(o[0], 3.0);
    EXPECT_EQ(o[1], 0.0);
    EXPECT_EQ(o[2], 0.0);

    std::mt19937_64 rng(37);
    auto r = testing_support::random_rank1(rng, 2, 2);
    auto x = testing_support::random_sequence(rng, 6, 2);
    auto dx = increments(x);
    double expect = 0.0;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            expect += r.components[1][0].dot(dx.row(i).transpose()) * r.components[1][1].dot(dx.row(j).transpose());
    EXPECT_NEAR(rank1_oracle(x, r)[2], expect, 1e-12);
}

TEST(Rank1Oracle, Guard) {
    std::mt19937_64 rng(38);
    EXPECT_THROW(rank1_oracle(testing_support::random_sequence(rng, 13, 1), Rank1Element::zeros(1, 2)), CapacityError);
}

TEST(LS2TWeights, InitVarianceAndFileRoundTrip) {
    auto w = init_ls2t_weights(LS2TWeights::Variant::independent, 200, 2, 4, 9);
    EXPECT_NEAR(w.z[1][1].array().square().mean(), 0.25, 0.03);
    std::stringstream ss;
    write_ls2t_weights(ss, w);
    auto r = read_ls2t_weights(ss, "mem");
    EXPECT_EQ(r.variant, w.variant);
    for (int m = 0; m < 2; ++m)
        for (std::size_t k = 0; k < w.z[m].size(); ++k) EXPECT_EQ(r.z[m][k], w.z[m][k]);
}

TEST(LS2TWeights, MissingEntriesRejected) {
    std::stringstream ss("variant,width,trunc,dim\nrecursive,1,2,1\nfunctional,level,component,c0\n0,1,1,0.5\n");
    EXPECT_THROW(read_ls2t_weights(ss, "mem"), InputError);
}
