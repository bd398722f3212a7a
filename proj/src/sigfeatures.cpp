#include "sigkit/sigfeatures.hpp"

#include "sigkit/errors.hpp"
#include "sigkit/parallel.hpp"

#include <cmath>

namespace sigkit {

void SignatureConfig::validate() const {
    if (trunc < 1) throw ConfigError("truncation level must be >= 1");
    if (order < 1 || order > trunc)
        throw ConfigError("order must lie in 1..trunc (got order " + std::to_string(order) + ", trunc " +
                          std::to_string(trunc) + ")");
}

namespace {

// S <- S * E_p(v) where E_p(v) = sum_{r<=p} v^{(x)r} / r!, truncated at M.
void multiply_by_step(TruncatedTensorSeries& S, const Eigen::VectorXd& v, int p,
                      std::vector<std::vector<double>>& powers) {
    const int M = S.trunc();
    const int d = S.dim();
    const std::vector<double> vv(v.data(), v.data() + d);
    powers[0] = {1.0};
    for (int r = 1; r <= std::min(p, M); ++r) {
        powers[r] = outer(powers[r - 1], vv);
        for (auto& x : powers[r]) x /= double(r);
    }
    // Top down so lower levels still hold their old values when read.
    for (int m = M; m >= 1; --m) {
        auto& target = S.level(m);
        for (int r = 1; r <= std::min(p, m); ++r) {
            const auto& lo = S.level(m - r);
            const auto& pw = powers[r];
            std::size_t k = 0;
            for (double x : lo) {
                if (x == 0.0) {
                    k += pw.size();
                    continue;
                }
                for (double y : pw) target[k++] += x * y;
            }
        }
    }
}

} // namespace

void normalize_tensor_levels(TruncatedTensorSeries& t) {
    for (int m = 1; m <= t.trunc(); ++m) {
        const double n = t.level_norm(m);
        if (n < 1e-12) {
            std::fill(t.level(m).begin(), t.level(m).end(), 0.0);
            continue;
        }
        for (auto& x : t.level(m)) x /= n;
    }
}

std::vector<TruncatedTensorSeries> signature_stream(const Sequence& seq, const SignatureConfig& cfg) {
    cfg.validate();
    const Sequence x = augment(seq, cfg.augmentations);
    check_capacity(x.dim(), cfg.trunc);
    const Eigen::MatrixXd dx = increments(x);
    std::vector<TruncatedTensorSeries> out;
    out.reserve(dx.rows() + 1);
    TruncatedTensorSeries S = TruncatedTensorSeries::unit(x.dim(), cfg.trunc);
    std::vector<std::vector<double>> powers(cfg.trunc + 1);
    out.push_back(S);
    for (Eigen::Index l = 0; l < dx.rows(); ++l) {
        multiply_by_step(S, dx.row(l).transpose(), cfg.order, powers);
        out.push_back(S);
    }
    if (cfg.normalize_levels)
        for (auto& t : out) normalize_tensor_levels(t);
    return out;
}

TruncatedTensorSeries signature(const Sequence& seq, const SignatureConfig& cfg) {
    cfg.validate();
    const Sequence x = augment(seq, cfg.augmentations);
    check_capacity(x.dim(), cfg.trunc);
    const Eigen::MatrixXd dx = increments(x);
    TruncatedTensorSeries S = TruncatedTensorSeries::unit(x.dim(), cfg.trunc);
    std::vector<std::vector<double>> powers(cfg.trunc + 1);
    for (Eigen::Index l = 0; l < dx.rows(); ++l) multiply_by_step(S, dx.row(l).transpose(), cfg.order, powers);
    if (cfg.normalize_levels) normalize_tensor_levels(S);
    return S;
}

TruncatedTensorSeries signature_brute(const Sequence& seq, const SignatureConfig& cfg) {
    cfg.validate();
    const Sequence x = augment(seq, cfg.augmentations);
    const int L = x.length(), d = x.dim(), M = cfg.trunc, p = cfg.order;
    if (L > 12 || M > 4) throw CapacityError("brute-force signature limited to L <= 12 and M <= 4");
    TruncatedTensorSeries S(d, M);
    S.level(0)[0] = 1.0;
    const Eigen::MatrixXd dx = increments(x);
    for (int m = 1; m <= M && L > 0; ++m) {
        auto& level = S.level(m);
        std::vector<int> idx(m, 0);
        // Walk all nondecreasing tuples in [0, L)^m.
        while (true) {
            double weight = 1.0;
            bool ok = true;
            int run = 1;
            for (int k = 1; k <= m; ++k) {
                if (k < m && idx[k] == idx[k - 1]) {
                    ++run;
                    continue;
                }
                if (run > p) ok = false;
                for (int f = 2; f <= run; ++f) weight /= f;
                run = 1;
            }
            if (ok) {
                // Every multi-index of the output, product of coordinates.
                std::vector<int> c(m, 0);
                for (std::size_t flat = 0; flat < level.size(); ++flat) {
                    std::size_t rem = flat;
                    for (int k = m - 1; k >= 0; --k) {
                        c[k] = static_cast<int>(rem % d);
                        rem /= d;
                    }
                    double prod = weight;
                    for (int k = 0; k < m; ++k) prod *= dx(idx[k], c[k]);
                    level[flat] += prod;
                }
            }
            int k = m - 1;
            while (k >= 0 && idx[k] == L - 1) --k;
            if (k < 0) break;
            ++idx[k];
            for (int j = k + 1; j < m; ++j) idx[j] = idx[k];
        }
    }
    if (cfg.normalize_levels) normalize_tensor_levels(S);
    return S;
}

Eigen::MatrixXd signature_features(const SequenceBatch& batch, const SignatureConfig& cfg, int jobs) {
    if (batch.size() == 0) throw InputError("empty batch");
    const int d = augment(batch.sequences[0], cfg.augmentations).dim();
    check_capacity(d, cfg.trunc);
    std::size_t width = 0;
    for (int m = 0; m <= cfg.trunc; ++m) width += ipow(d, m);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(batch.size()), static_cast<Eigen::Index>(width));
    parallel_for(batch.size(), jobs, [&](std::size_t i) {
        const auto flat = signature(batch.sequences[i], cfg).flatten();
        if (flat.size() != width) throw ShapeError("batch has mixed channel counts");
        for (std::size_t k = 0; k < width; ++k) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = flat[k];
    });
    return out;
}

std::vector<std::string> level_column_names(const std::vector<std::size_t>& level_sizes) {
    std::vector<std::string> names;
    for (std::size_t m = 0; m < level_sizes.size(); ++m)
        for (std::size_t k = 0; k < level_sizes[m]; ++k)
            names.push_back("m" + std::to_string(m) + "_" + std::to_string(k));
    return names;
}

} // namespace sigkit
