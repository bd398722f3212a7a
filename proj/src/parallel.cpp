#include "sigkit/parallel.hpp"

#include "sigkit/errors.hpp"

namespace sigkit {

namespace {

void scan_block(const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b, Eigen::Index lo, Eigen::Index hi,
                Eigen::ArrayXXd& h) {
    for (Eigen::Index l = lo; l < hi; ++l) {
        if (l == lo)
            h.row(l) = b.row(l);
        else
            h.row(l) = a.row(l) * h.row(l - 1) + b.row(l);
    }
}

} // namespace

Eigen::ArrayXXd linear_scan(const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b, int jobs) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("scan operands differ in shape");
    const Eigen::Index L = b.rows(), C = b.cols();
    Eigen::ArrayXXd h(L, C);
    if (L == 0) return h;
    const Eigen::Index blocks = std::min<Eigen::Index>(std::max(jobs, 1), L);
    if (blocks <= 1) {
        scan_block(a, b, 0, L, h);
        return h;
    }
    // Pass 1: each block scanned from a zero carry, and the running product of a.
    std::vector<Eigen::Index> lo(blocks + 1);
    for (Eigen::Index k = 0; k <= blocks; ++k) lo[k] = L * k / blocks;
    Eigen::ArrayXXd gain(L, C);
    parallel_for(static_cast<std::size_t>(blocks), jobs, [&](std::size_t k) {
        scan_block(a, b, lo[k], lo[k + 1], h);
        for (Eigen::Index l = lo[k]; l < lo[k + 1]; ++l)
            gain.row(l) = l == lo[k] ? a.row(l) : Eigen::ArrayXXd(gain.row(l - 1) * a.row(l));
    });
    // Pass 2: carries between blocks, sequential over the few block boundaries.
    std::vector<Eigen::ArrayXXd> carry(blocks, Eigen::ArrayXXd::Zero(1, C));
    for (Eigen::Index k = 1; k < blocks; ++k) {
        const Eigen::Index last = lo[k] - 1;
        carry[k] = h.row(last) + gain.row(last) * carry[k - 1];
    }
    // Pass 3: fix up each block with its incoming carry.
    parallel_for(static_cast<std::size_t>(blocks), jobs, [&](std::size_t k) {
        if (k == 0) return;
        for (Eigen::Index l = lo[k]; l < lo[k + 1]; ++l) h.row(l) += gain.row(l) * carry[k];
    });
    return h;
}

Eigen::ArrayXXd prefix_sum(const Eigen::ArrayXXd& b, int jobs) {
    return linear_scan(Eigen::ArrayXXd::Ones(b.rows(), b.cols()), b, jobs);
}

} // namespace sigkit
