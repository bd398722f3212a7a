#include "sigkit/sigkernels.hpp"

#include "sigkit/errors.hpp"
#include "sigkit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sigkit {

StaticKernelSpec::Kind parse_static_kind(const std::string& s) {
    if (s == "linear") return StaticKernelSpec::Kind::linear;
    if (s == "rbf") return StaticKernelSpec::Kind::rbf;
    throw ConfigError("unknown static kernel '" + s + "' (expected linear or rbf)");
}

const char* static_kind_name(StaticKernelSpec::Kind k) {
    return k == StaticKernelSpec::Kind::linear ? "linear" : "rbf";
}

void GramConfig::validate() const {
    if (trunc < 1) throw ConfigError("truncation level must be >= 1");
    if (order < 1 || order > trunc) throw ConfigError("order must lie in 1..trunc");
    if (static_kernel.kind == StaticKernelSpec::Kind::rbf && !static_kernel.alpha &&
        !(static_kernel.sigma > 0.0 && std::isfinite(static_kernel.sigma)))
        throw ConfigError("rbf bandwidth must be finite and positive");
    if (static_kernel.alpha && !(*static_kernel.alpha > 0.0)) throw ConfigError("alpha must be positive");
}

double static_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const StaticKernelSpec& spec) {
    if (x.size() != y.size()) throw ShapeError("static kernel inputs differ in dimension");
    if (spec.kind == StaticKernelSpec::Kind::linear) return x.dot(y);
    return std::exp(-(x - y).squaredNorm() / (2.0 * spec.sigma * spec.sigma));
}

Eigen::MatrixXd static_matrix(const Sequence& x, const Sequence& y, const StaticKernelSpec& spec) {
    if (x.dim() != y.dim()) throw ShapeError("sequences differ in dimension");
    const auto& a = x.values();
    const auto& b = y.values();
    if (spec.kind == StaticKernelSpec::Kind::linear) return a * b.transpose();
    Eigen::MatrixXd k(a.rows(), b.rows());
    const double scale = 1.0 / (2.0 * spec.sigma * spec.sigma);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j) k(i, j) = std::exp(-(a.row(i) - b.row(j)).squaredNorm() * scale);
    return k;
}

std::vector<double> signature_kernel_pair(const Sequence& x, const Sequence& y, int M, int p,
                                          const StaticKernelSpec& spec) {
    std::vector<double> out(M + 1, 0.0);
    out[0] = 1.0;
    const Eigen::Index Lx = x.length(), Ly = y.length();
    if (Lx == 0 || Ly == 0) return out;
    const Eigen::MatrixXd k = static_matrix(x, y, spec);
    const Eigen::ArrayXXd dk = (k.bottomRightCorner(Lx, Ly) - k.topRightCorner(Lx, Ly) -
                                k.bottomLeftCorner(Lx, Ly) + k.topLeftCorner(Lx, Ly))
                                   .array();

    // A[r][s](i,j): weighted sum over index tuples whose last entries sit at (i, j)
    // with trailing run lengths r and s.
    const int R = std::min(p, M);
    using Grid = std::vector<std::vector<Eigen::ArrayXXd>>;
    Grid A(R + 1, std::vector<Eigen::ArrayXXd>(R + 1));
    A[1][1] = dk;
    out[1] = dk.sum();
    for (int m = 2; m <= M; ++m) {
        const int prev = std::min(R, m - 1);
        Eigen::ArrayXXd total = Eigen::ArrayXXd::Zero(Lx, Ly);
        std::vector<Eigen::ArrayXXd> by_r(prev + 1), by_s(prev + 1);
        for (int r = 1; r <= prev; ++r) {
            by_r[r] = Eigen::ArrayXXd::Zero(Lx, Ly);
            by_s[r] = Eigen::ArrayXXd::Zero(Lx, Ly);
        }
        for (int r = 1; r <= prev; ++r)
            for (int s = 1; s <= prev; ++s) {
                total += A[r][s];
                by_r[r] += A[r][s];
                by_s[s] += A[r][s];
            }
        Grid next(R + 1, std::vector<Eigen::ArrayXXd>(R + 1));
        const int cur = std::min(R, m);
        // Both runs start fresh: strict predecessor in both axes.
        {
            Eigen::ArrayXXd strict = Eigen::ArrayXXd::Zero(Lx, Ly);
            Eigen::ArrayXXd cum = total;
            for (Eigen::Index i = 1; i < Lx; ++i) cum.row(i) += cum.row(i - 1);
            for (Eigen::Index j = 1; j < Ly; ++j) cum.col(j) += cum.col(j - 1);
            strict.bottomRightCorner(Lx - 1, Ly - 1) = cum.topLeftCorner(Lx - 1, Ly - 1);
            next[1][1] = dk * strict;
        }
        for (int r = 2; r <= cur; ++r) {
            // x index repeats, y index advances strictly.
            Eigen::ArrayXXd strict = Eigen::ArrayXXd::Zero(Lx, Ly);
            if (r - 1 <= prev) {
                Eigen::ArrayXXd cum = by_r[r - 1];
                for (Eigen::Index j = 1; j < Ly; ++j) cum.col(j) += cum.col(j - 1);
                strict.rightCols(Ly - 1) = cum.leftCols(Ly - 1);
            }
            next[r][1] = dk * strict / double(r);
        }
        for (int s = 2; s <= cur; ++s) {
            Eigen::ArrayXXd strict = Eigen::ArrayXXd::Zero(Lx, Ly);
            if (s - 1 <= prev) {
                Eigen::ArrayXXd cum = by_s[s - 1];
                for (Eigen::Index i = 1; i < Lx; ++i) cum.row(i) += cum.row(i - 1);
                strict.bottomRows(Lx - 1) = cum.topRows(Lx - 1);
            }
            next[1][s] = dk * strict / double(s);
        }
        for (int r = 2; r <= cur; ++r)
            for (int s = 2; s <= cur; ++s) {
                if (r - 1 <= prev && s - 1 <= prev)
                    next[r][s] = dk * A[r - 1][s - 1] / double(r * s);
                else
                    next[r][s] = Eigen::ArrayXXd::Zero(Lx, Ly);
            }
        A = std::move(next);
        double km = 0.0;
        for (int r = 1; r <= cur; ++r)
            for (int s = 1; s <= cur; ++s) km += A[r][s].sum();
        out[m] = km;
    }
    return out;
}

namespace {

std::vector<Eigen::VectorXd> pooled_states(const SequenceBatch& X, const SequenceBatch* Y) {
    std::vector<Eigen::VectorXd> pts;
    auto add = [&](const SequenceBatch& b) {
        for (const auto& s : b.sequences)
            for (Eigen::Index i = 0; i < s.values().rows(); ++i) pts.push_back(s.values().row(i).transpose());
    };
    add(X);
    if (Y) add(*Y);
    return pts;
}

double median_of_pairs(std::vector<Eigen::VectorXd> pts, double alpha) {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    constexpr std::size_t max_points = 2000;
    if (pts.size() > max_points) {
        // Evenly strided subsample keeps the result deterministic.
        std::vector<Eigen::VectorXd> sub;
        sub.reserve(max_points);
        for (std::size_t k = 0; k < max_points; ++k) sub.push_back(pts[k * pts.size() / max_points]);
        pts = std::move(sub);
    }
    std::vector<double> dist;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (pts[i].size() != pts[j].size()) throw ShapeError("batch has mixed channel counts");
            const double v = (pts[i] - pts[j]).norm();
            if (v > 0.0) dist.push_back(v / 2.0);
        }
    if (dist.empty()) throw DomainError("median heuristic needs at least two distinct states");
    const std::size_t n = dist.size();
    std::nth_element(dist.begin(), dist.begin() + n / 2, dist.end());
    double med = dist[n / 2];
    if (n % 2 == 0) {
        const double lower = *std::max_element(dist.begin(), dist.begin() + n / 2);
        med = 0.5 * (med + lower);
    }
    return alpha * med;
}

Sequence lifted(const Sequence& s, const std::vector<Augmentation>& augs) {
    return augs.empty() ? s : augment(s, augs);
}

} // namespace

double median_bandwidth(const SequenceBatch& X, double alpha) {
    return median_of_pairs(pooled_states(X, nullptr), alpha);
}

double median_bandwidth(const SequenceBatch& X, const SequenceBatch& Y, double alpha) {
    return median_of_pairs(pooled_states(X, &Y), alpha);
}

std::vector<double> default_alpha_grid() {
    std::vector<double> g(19);
    for (int i = 0; i < 19; ++i) g[i] = std::pow(10.0, -3.0 + 6.0 * i / 18.0);
    return g;
}

GramResult gram(const SequenceBatch& X, const SequenceBatch& Y, const GramConfig& cfg) {
    cfg.validate();
    if (X.size() == 0 || Y.size() == 0) throw InputError("gram needs non-empty batches");
    std::vector<Sequence> xs, ys;
    for (const auto& s : X.sequences) xs.push_back(lifted(s, cfg.augmentations));
    for (const auto& s : Y.sequences) ys.push_back(lifted(s, cfg.augmentations));
    const int d = xs[0].dim();
    for (const auto& s : xs)
        if (s.dim() != d) throw ShapeError("batch has mixed channel counts");
    for (const auto& s : ys)
        if (s.dim() != d) throw ShapeError("X and Y differ in channel count");

    double cells = 0.0, self_cells = 0.0;
    for (const auto& a : xs)
        for (const auto& b : ys) cells += double(a.length()) * double(b.length());
    if (cfg.normalize) {
        for (const auto& a : xs) self_cells += double(a.length()) * double(a.length());
        for (const auto& b : ys) self_cells += double(b.length()) * double(b.length());
    }
    const double estimate = (cells + self_cells) * cfg.order * cfg.order * cfg.trunc;
    if (estimate > cfg.cell_cap)
        throw CapacityError("gram job needs about " + std::to_string(static_cast<long long>(estimate)) +
                            " DP cells, above the cap of " +
                            std::to_string(static_cast<long long>(cfg.cell_cap)));

    StaticKernelSpec spec = cfg.static_kernel;
    if (spec.kind == StaticKernelSpec::Kind::rbf && spec.alpha) {
        SequenceBatch bx, by;
        bx.sequences = xs;
        by.sequences = ys;
        spec.sigma = median_bandwidth(bx, by, *spec.alpha);
    }

    const int M = cfg.trunc;
    const Eigen::Index nx = static_cast<Eigen::Index>(xs.size()), ny = static_cast<Eigen::Index>(ys.size());
    GramResult res;
    res.sigma = spec.kind == StaticKernelSpec::Kind::rbf ? spec.sigma : 0.0;
    res.levels.assign(M + 1, Eigen::MatrixXd::Zero(nx, ny));
    res.levels[0].setOnes();
    // Identical batches: fill the upper triangle and mirror, so the output is exactly symmetric.
    bool same = nx == ny;
    for (Eigen::Index i = 0; same && i < nx; ++i) same = xs[i].values() == ys[i].values();
    parallel_for(static_cast<std::size_t>(nx * ny), cfg.jobs, [&](std::size_t c) {
        const Eigen::Index i = static_cast<Eigen::Index>(c) / ny, j = static_cast<Eigen::Index>(c) % ny;
        if (same && j < i) return;
        const auto k = signature_kernel_pair(xs[i], ys[j], M, cfg.order, spec);
        for (int m = 1; m <= M; ++m) res.levels[m](i, j) = k[m];
    });
    if (same)
        for (int m = 1; m <= M; ++m) res.levels[m].triangularView<Eigen::StrictlyLower>() = res.levels[m].transpose();

    if (cfg.normalize) {
        Eigen::MatrixXd dx(nx, M + 1), dy(ny, M + 1);
        parallel_for(static_cast<std::size_t>(nx + ny), cfg.jobs, [&](std::size_t c) {
            const bool is_x = static_cast<Eigen::Index>(c) < nx;
            const Sequence& s = is_x ? xs[c] : ys[c - nx];
            const auto k = signature_kernel_pair(s, s, M, cfg.order, spec);
            for (int m = 0; m <= M; ++m) {
                const double v = std::sqrt(std::max(k[m], 0.0));
                if (is_x)
                    dx(static_cast<Eigen::Index>(c), m) = v;
                else
                    dy(static_cast<Eigen::Index>(c) - nx, m) = v;
            }
        });
        for (int m = 1; m <= M; ++m)
            for (Eigen::Index i = 0; i < nx; ++i)
                for (Eigen::Index j = 0; j < ny; ++j) {
                    const double a = dx(i, m), b = dy(j, m);
                    res.levels[m](i, j) = (a < 1e-12 || b < 1e-12) ? 0.0 : res.levels[m](i, j) / (a * b);
                }
    }

    res.combined = Eigen::MatrixXd::Zero(nx, ny);
    for (int m = 0; m <= M; ++m) res.combined += res.levels[m];
    if (!res.combined.allFinite()) throw NumericError("gram matrix has nonfinite entries");
    return res;
}

Eigen::MatrixXd inducing_gram(const std::vector<Rank1Element>& Z, const std::vector<double>& sigmas) {
    if (Z.empty()) throw InputError("no inducing tensors");
    const int M = Z[0].M;
    if (static_cast<int>(sigmas.size()) != M + 1) throw ShapeError("need M+1 scale factors");
    const int d = M > 0 ? Z[0].dim() : 0;
    for (const auto& z : Z) {
        if (z.M != M || (M > 0 && z.dim() != d)) throw ShapeError("inducing tensors differ in shape");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(Z.size());
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double v = sigmas[0] * sigmas[0] * Z[i].scalar * Z[j].scalar;
            for (int m = 1; m <= M; ++m) {
                double prod = 1.0;
                for (int k = 0; k < m; ++k) prod *= Z[i].components[m - 1][k].dot(Z[j].components[m - 1][k]);
                v += sigmas[m] * sigmas[m] * prod;
            }
            K(i, j) = v;
        }
    return K;
}

Eigen::MatrixXd cross_gram(const std::vector<Rank1Element>& Z, const SequenceBatch& X, const CrossGramConfig& cfg) {
    if (cfg.static_kernel.kind != StaticKernelSpec::Kind::linear)
        throw UnsupportedError("cross covariances are only available for the linear static kernel");
    if (Z.empty()) throw InputError("no inducing tensors");
    const int M = Z[0].M;
    if (static_cast<int>(cfg.sigmas.size()) != M + 1) throw ShapeError("need M+1 scale factors");
    Eigen::MatrixXd K(static_cast<Eigen::Index>(Z.size()), static_cast<Eigen::Index>(X.size()));
    for (std::size_t j = 0; j < X.size(); ++j) {
        const Sequence x = lifted(X.sequences[j], cfg.augmentations);
        const Eigen::MatrixXd dx = increments(x);
        const Eigen::Index L = dx.rows();
        for (std::size_t i = 0; i < Z.size(); ++i) {
            const auto& z = Z[i];
            if (z.M != M) throw ShapeError("inducing tensors differ in truncation");
            double v = cfg.sigmas[0] * cfg.sigmas[0] * z.scalar;
            for (int m = 1; m <= M && L > 0; ++m) {
                // acc(t): sum over increasing k-tuples ending at or before t.
                Eigen::VectorXd acc = Eigen::VectorXd::Ones(L + 1);
                for (int k = 0; k < m; ++k) {
                    const auto& vk = z.components[m - 1][k];
                    if (vk.size() != dx.cols()) throw ShapeError("inducing tensor dimension mismatch");
                    const Eigen::VectorXd c = dx * vk;
                    Eigen::VectorXd next = Eigen::VectorXd::Zero(L + 1);
                    for (Eigen::Index t = 0; t < L; ++t) next(t + 1) = next(t) + acc(t) * c(t);
                    acc = std::move(next);
                }
                v += cfg.sigmas[m] * cfg.sigmas[m] * acc(L);
            }
            K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return K;
}

} // namespace sigkit
