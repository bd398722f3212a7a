#include "sigkit/errors.hpp"
#include "sigkit/tensoralg.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace sigkit;
using testing_support::max_abs_diff;

namespace {

TruncatedTensorSeries scalar_series(std::initializer_list<double> v) {
    TruncatedTensorSeries t(1, static_cast<int>(v.size()) - 1);
    int m = 0;
    for (double x : v) t.level(m++)[0] = x;
    return t;
}

} // namespace

TEST(AlgebraMul, UnitIsIdentity) {
    std::mt19937_64 rng(1);
    auto b = testing_support::random_series(rng, 2, 3, 0.7);
    auto u = TruncatedTensorSeries::unit(2, 3);
    EXPECT_EQ(max_abs_diff(algebra_mul(u, b), b), 0.0);
    EXPECT_EQ(max_abs_diff(algebra_mul(b, u), b), 0.0);
}

TEST(AlgebraMul, ScalarConvolution) {
    auto c = algebra_mul(scalar_series({1, 2, 0}), scalar_series({1, 3, 0}));
    EXPECT_DOUBLE_EQ(c.level(0)[0], 1.0);
    EXPECT_DOUBLE_EQ(c.level(1)[0], 5.0);
    EXPECT_DOUBLE_EQ(c.level(2)[0], 6.0);
}

TEST(AlgebraMul, NonCommutative) {
    TruncatedTensorSeries a = TruncatedTensorSeries::unit(2, 2), b = TruncatedTensorSeries::unit(2, 2);
    a.level(1) = {1, 0};
    b.level(1) = {0, 1};
    auto ab = algebra_mul(a, b), ba = algebra_mul(b, a);
    EXPECT_EQ(ab.level(1), ba.level(1));
    EXPECT_NE(ab.level(2), ba.level(2));
}

TEST(AlgebraMul, Associative) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 1 + trial % 3, M = 1 + (trial / 3) % 3;
        auto a = testing_support::random_series(rng, d, M, 0.3);
        auto b = testing_support::random_series(rng, d, M, -1.2);
        auto c = testing_support::random_series(rng, d, M, 2.0);
        EXPECT_LT(max_abs_diff(algebra_mul(algebra_mul(a, b), c), algebra_mul(a, algebra_mul(b, c))), 1e-12);
    }
}

TEST(AlgebraMul, ShapeMismatch) {
    EXPECT_THROW(algebra_mul(TruncatedTensorSeries(2, 2), TruncatedTensorSeries(3, 2)), ShapeError);
    EXPECT_THROW(algebra_mul(TruncatedTensorSeries(2, 2), TruncatedTensorSeries(2, 3)), ShapeError);
}

TEST(TensorExp, ZeroIsUnit) {
    auto e = tensor_exp(Eigen::Vector2d::Zero(), 3);
    EXPECT_EQ(max_abs_diff(e, TruncatedTensorSeries::unit(2, 3)), 0.0);
}

TEST(TensorExp, ScalarValues) {
    auto e = tensor_exp(Eigen::VectorXd::Constant(1, 2.0), 3);
    EXPECT_DOUBLE_EQ(e.level(1)[0], 2.0);
    EXPECT_DOUBLE_EQ(e.level(2)[0], 2.0);
    EXPECT_NEAR(e.level(3)[0], 4.0 / 3.0, 1e-15);
}

TEST(TensorExp, ScalarInverse) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(1, 0.8);
    auto p = algebra_mul(tensor_exp(v, 4), tensor_exp(-v, 4));
    EXPECT_LT(max_abs_diff(p, TruncatedTensorSeries::unit(1, 4)), 1e-15);
}

TEST(Inverse, UnitAndGeometricSeries) {
    EXPECT_EQ(max_abs_diff(inverse(TruncatedTensorSeries::unit(2, 3)), TruncatedTensorSeries::unit(2, 3)), 0.0);
    TruncatedTensorSeries a = TruncatedTensorSeries::unit(2, 3);
    a.level(1) = {0.5, -2.0};
    auto inv = inverse(a);
    // (1 + u)^-1 = 1 - u + u(x)u - u(x)u(x)u
    std::vector<double> u{0.5, -2.0}, neg{-0.5, 2.0};
    EXPECT_EQ(inv.level(1), neg);
    auto uu = outer(u, u);
    for (std::size_t k = 0; k < uu.size(); ++k) EXPECT_NEAR(inv.level(2)[k], uu[k], 1e-15);
    auto uuu = outer(uu, u);
    for (std::size_t k = 0; k < uuu.size(); ++k) EXPECT_NEAR(inv.level(3)[k], -uuu[k], 1e-15);
}

TEST(Inverse, RandomRoundTrip) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        auto a = testing_support::random_series(rng, 2, 3, 1.0);
        EXPECT_LT(max_abs_diff(algebra_mul(a, inverse(a)), TruncatedTensorSeries::unit(2, 3)), 1e-12);
        EXPECT_LT(max_abs_diff(algebra_mul(inverse(a), a), TruncatedTensorSeries::unit(2, 3)), 1e-12);
    }
    auto b = testing_support::random_series(rng, 2, 2, 2.5);
    EXPECT_LT(max_abs_diff(algebra_mul(b, inverse(b)), TruncatedTensorSeries::unit(2, 2)), 1e-12);
}

TEST(Inverse, ZeroScalarIsDomainError) {
    EXPECT_THROW(inverse(TruncatedTensorSeries(2, 2)), DomainError);
}

TEST(Inner, Values) {
    EXPECT_DOUBLE_EQ(inner(TruncatedTensorSeries::unit(3, 2), TruncatedTensorSeries::unit(3, 2)), 1.0);
    auto e = tensor_exp(Eigen::VectorXd::Ones(1), 2);
    EXPECT_DOUBLE_EQ(inner(e, e), 2.25);
}

TEST(Inner, SymmetricAndPositive) {
    std::mt19937_64 rng(4);
    auto a = testing_support::random_series(rng, 3, 2, 0.1);
    auto b = testing_support::random_series(rng, 3, 2, 0.4);
    EXPECT_DOUBLE_EQ(inner(a, b), inner(b, a));
    EXPECT_GT(inner(a, a), 0.0);
}

TEST(Densify, Level1) {
    Rank1Element r = Rank1Element::zeros(2, 1, 3.0);
    r.components[0][0] = Eigen::Vector2d(1, 2);
    auto t = densify(r);
    EXPECT_EQ(t.level(0)[0], 3.0);
    EXPECT_EQ(t.level(1), (std::vector<double>{1, 2}));
}

TEST(Densify, InnerFactorizes) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto r = testing_support::random_rank1(rng, 3, 3);
        auto s = testing_support::random_rank1(rng, 3, 3);
        double expect = r.scalar * s.scalar;
        for (int m = 1; m <= 3; ++m) {
            double prod = 1.0;
            for (int k = 0; k < m; ++k) prod *= r.components[m - 1][k].dot(s.components[m - 1][k]);
            expect += prod;
        }
        EXPECT_NEAR(inner(densify(r), densify(s)), expect, 1e-10);
    }
}

TEST(Densify, ZeroComponentZeroesLevel) {
    std::mt19937_64 rng(6);
    auto r = testing_support::random_rank1(rng, 2, 3);
    r.components[2][1].setZero();
    EXPECT_EQ(densify(r).level_norm(3), 0.0);
    EXPECT_GT(densify(r).level_norm(2), 0.0);
}

TEST(Capacity, Guard) {
    EXPECT_THROW(TruncatedTensorSeries(10, 8), CapacityError);
    EXPECT_NO_THROW(TruncatedTensorSeries(100, 3));
    EXPECT_THROW(TruncatedTensorSeries(100, 4), CapacityError);
}
