#include "sigkit/tensoralg.hpp"

#include "sigkit/errors.hpp"

#include <cmath>
#include <string>

namespace sigkit {

std::size_t ipow(std::size_t base, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

void check_capacity(int d, int M) {
    if (d < 1) throw ShapeError("tensor base dimension must be >= 1");
    if (M < 0) throw ShapeError("truncation must be >= 0");
    if (std::pow(double(d), double(M)) > max_tensor_entries)
        throw CapacityError("tensor level of " + std::to_string(d) + "^" + std::to_string(M) +
                            " entries exceeds the 1e7 entry limit");
}

TruncatedTensorSeries::TruncatedTensorSeries(int d, int M) : d_(d), M_(M) {
    check_capacity(d, M);
    levels_.resize(M + 1);
    for (int m = 0; m <= M; ++m) levels_[m].assign(ipow(d, m), 0.0);
}

TruncatedTensorSeries TruncatedTensorSeries::unit(int d, int M) {
    TruncatedTensorSeries t(d, M);
    t.levels_[0][0] = 1.0;
    return t;
}

double TruncatedTensorSeries::level_norm(int m) const {
    double s = 0.0;
    for (double v : levels_[m]) s += v * v;
    return std::sqrt(s);
}

std::vector<double> TruncatedTensorSeries::flatten() const {
    std::vector<double> out;
    out.reserve(size());
    for (const auto& l : levels_) out.insert(out.end(), l.begin(), l.end());
    return out;
}

std::size_t TruncatedTensorSeries::size() const {
    std::size_t n = 0;
    for (const auto& l : levels_) n += l.size();
    return n;
}

int Rank1Element::dim() const {
    if (components.empty() || components[0].empty()) throw ShapeError("rank-1 element has no components");
    return static_cast<int>(components[0][0].size());
}

Rank1Element Rank1Element::zeros(int d, int M, double scalar) {
    Rank1Element r;
    r.M = M;
    r.scalar = scalar;
    r.components.resize(M);
    for (int m = 1; m <= M; ++m) r.components[m - 1].assign(m, Eigen::VectorXd::Zero(d));
    return r;
}

std::vector<double> outer(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() * b.size());
    std::size_t k = 0;
    for (double x : a)
        for (double y : b) out[k++] = x * y;
    return out;
}

namespace {

void check_same(const TruncatedTensorSeries& a, const TruncatedTensorSeries& b) {
    if (a.dim() != b.dim() || a.trunc() != b.trunc())
        throw ShapeError("tensor series shapes differ: (d=" + std::to_string(a.dim()) + ", M=" +
                         std::to_string(a.trunc()) + ") vs (d=" + std::to_string(b.dim()) +
                         ", M=" + std::to_string(b.trunc()) + ")");
}

} // namespace

TruncatedTensorSeries algebra_mul(const TruncatedTensorSeries& a, const TruncatedTensorSeries& b) {
    check_same(a, b);
    const int M = a.trunc();
    TruncatedTensorSeries c(a.dim(), M);
    for (int m = 0; m <= M; ++m) {
        auto& cm = c.level(m);
        for (int i = 0; i <= m; ++i) {
            const auto& ai = a.level(i);
            const auto& bj = b.level(m - i);
            std::size_t k = 0;
            for (double x : ai)
                for (double y : bj) cm[k++] += x * y;
        }
    }
    return c;
}

TruncatedTensorSeries tensor_exp(const Eigen::VectorXd& v, int M) {
    const int d = static_cast<int>(v.size());
    TruncatedTensorSeries t = TruncatedTensorSeries::unit(d, M);
    std::vector<double> vv(v.data(), v.data() + d);
    for (int m = 1; m <= M; ++m) {
        auto next = outer(t.level(m - 1), vv);
        for (auto& x : next) x /= double(m);
        t.level(m) = std::move(next);
    }
    return t;
}

TruncatedTensorSeries inverse(const TruncatedTensorSeries& a) {
    const double a0 = a.scalar();
    if (a0 == 0.0) throw DomainError("series with zero scalar term is not invertible");
    const int d = a.dim(), M = a.trunc();
    // a = a0 (1 + u) with u nilpotent; a^-1 = a0^-1 sum_n (-u)^n.
    TruncatedTensorSeries u(d, M);
    for (int m = 1; m <= M; ++m) {
        u.level(m) = a.level(m);
        for (auto& x : u.level(m)) x = -x / a0;
    }
    TruncatedTensorSeries result = TruncatedTensorSeries::unit(d, M);
    TruncatedTensorSeries power = TruncatedTensorSeries::unit(d, M);
    for (int n = 1; n <= M; ++n) {
        power = algebra_mul(power, u);
        for (int m = 0; m <= M; ++m)
            for (std::size_t k = 0; k < power.level(m).size(); ++k) result.level(m)[k] += power.level(m)[k];
    }
    for (int m = 0; m <= M; ++m)
        for (auto& x : result.level(m)) x /= a0;
    return result;
}

double inner(const TruncatedTensorSeries& a, const TruncatedTensorSeries& b) {
    check_same(a, b);
    double s = 0.0;
    for (int m = 0; m <= a.trunc(); ++m)
        for (std::size_t k = 0; k < a.level(m).size(); ++k) s += a.level(m)[k] * b.level(m)[k];
    return s;
}

TruncatedTensorSeries densify(const Rank1Element& r) {
    const int d = r.M > 0 ? r.dim() : 1;
    TruncatedTensorSeries t(d, r.M);
    t.level(0)[0] = r.scalar;
    for (int m = 1; m <= r.M; ++m) {
        const auto& comps = r.components.at(m - 1);
        if (static_cast<int>(comps.size()) != m) throw ShapeError("rank-1 level needs m components");
        std::vector<double> acc{1.0};
        for (const auto& v : comps) {
            if (v.size() != d) throw ShapeError("rank-1 component dimension mismatch");
            acc = outer(acc, std::vector<double>(v.data(), v.data() + d));
        }
        t.level(m) = std::move(acc);
    }
    return t;
}

} // namespace sigkit
