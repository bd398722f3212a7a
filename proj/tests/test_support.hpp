#pragma once

#include "sigkit/seqdata.hpp"
#include "sigkit/tensoralg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace testing_support {

inline sigkit::Sequence random_sequence(std::mt19937_64& rng, int L, int d, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    Eigen::MatrixXd v(L + 1, d);
    for (int i = 0; i <= L; ++i)
        for (int c = 0; c < d; ++c) v(i, c) = nd(rng);
    return sigkit::Sequence(std::move(v));
}

inline sigkit::SequenceBatch random_batch(std::mt19937_64& rng, int n, int maxL, int d, double scale = 1.0) {
    std::uniform_int_distribution<int> ld(0, maxL);
    std::vector<sigkit::Sequence> s;
    for (int i = 0; i < n; ++i) s.push_back(random_sequence(rng, ld(rng), d, scale));
    return sigkit::make_batch(std::move(s));
}

inline sigkit::Rank1Element random_rank1(std::mt19937_64& rng, int d, int M) {
    std::normal_distribution<double> nd(0.0, 1.0);
    auto r = sigkit::Rank1Element::zeros(d, M, nd(rng));
    for (auto& level : r.components)
        for (auto& v : level)
            for (int c = 0; c < d; ++c) v(c) = nd(rng);
    return r;
}

inline sigkit::TruncatedTensorSeries random_series(std::mt19937_64& rng, int d, int M, double a0 = 1.0) {
    std::normal_distribution<double> nd(0.0, 1.0);
    sigkit::TruncatedTensorSeries t(d, M);
    t.level(0)[0] = a0;
    for (int m = 1; m <= M; ++m)
        for (auto& x : t.level(m)) x = nd(rng);
    return t;
}

// Sequence with `count` states duplicated at random positions.
inline sigkit::Sequence insert_repeats(std::mt19937_64& rng, const sigkit::Sequence& s, int count) {
    Eigen::MatrixXd v = s.values();
    for (int k = 0; k < count; ++k) {
        std::uniform_int_distribution<Eigen::Index> pos(0, v.rows() - 1);
        const Eigen::Index p = pos(rng);
        Eigen::MatrixXd w(v.rows() + 1, v.cols());
        w.topRows(p + 1) = v.topRows(p + 1);
        w.row(p + 1) = v.row(p);
        w.bottomRows(v.rows() - p - 1) = v.bottomRows(v.rows() - p - 1);
        v = std::move(w);
    }
    return sigkit::Sequence(std::move(v));
}

inline double max_abs_diff(const sigkit::TruncatedTensorSeries& a, const sigkit::TruncatedTensorSeries& b) {
    double m = 0.0;
    for (int l = 0; l <= a.trunc(); ++l)
        for (std::size_t k = 0; k < a.level(l).size(); ++k) m = std::max(m, std::abs(a.level(l)[k] - b.level(l)[k]));
    return m;
}

} // namespace testing_support
