#include "sigkit/randomfeatures.hpp"

#include "sigkit/csv.hpp"
#include "sigkit/errors.hpp"
#include "sigkit/parallel.hpp"
#include "sigkit/rng.hpp"
#include "sigkit/tensoralg.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace sigkit {

RandomFourierParams sample_params(const StaticKernelSpec& spec, int d, int rff_dim, int M, std::uint64_t seed,
                                  bool phase_variant) {
    if (spec.kind != StaticKernelSpec::Kind::rbf)
        throw UnsupportedError("random Fourier features need the rbf static kernel");
    if (!(spec.sigma > 0.0 && std::isfinite(spec.sigma))) throw ConfigError("rbf bandwidth must be positive");
    if (d < 1 || rff_dim < 1 || M < 1) throw ConfigError("random feature shapes must be positive");
    RandomFourierParams p;
    p.dim = d;
    p.rff_dim = rff_dim;
    p.levels = M;
    p.phase_variant = phase_variant;
    p.seed = seed;
    p.sigma = spec.sigma;
    p.lengthscales = Eigen::VectorXd::Constant(d, spec.sigma);
    for (int m = 1; m <= M; ++m) {
        // Index by (column, channel) so column q does not depend on rff_dim.
        CounterRng rng(seed, static_cast<std::uint64_t>(m), CounterRng::frequency);
        Eigen::MatrixXd w(d, rff_dim);
        for (int q = 0; q < rff_dim; ++q)
            for (int c = 0; c < d; ++c) w(c, q) = rng.normal(std::uint64_t(q) * d + c) / p.lengthscales(c);
        p.omega.push_back(std::move(w));
        if (phase_variant) {
            CounterRng prng(seed, static_cast<std::uint64_t>(m), CounterRng::phase);
            Eigen::VectorXd b(rff_dim);
            for (int q = 0; q < rff_dim; ++q) b(q) = 2.0 * std::numbers::pi * prng.uniform(static_cast<std::uint64_t>(q));
            p.phase.push_back(std::move(b));
        }
    }
    return p;
}

namespace {

void check_level(const RandomFourierParams& p, int m) {
    if (m < 1 || m > p.levels)
        throw ShapeError("random feature level " + std::to_string(m) + " outside 1.." + std::to_string(p.levels));
}

// All states of x mapped through level m; rows are time. Unscaled: cos/sin block, or plain cos with phase.
Eigen::MatrixXd lift_raw(const Eigen::MatrixXd& x, const RandomFourierParams& p, int m) {
    check_level(p, m);
    if (x.cols() != p.dim) throw ShapeError("random features expect dimension " + std::to_string(p.dim));
    Eigen::MatrixXd proj = x * p.omega[m - 1];
    if (p.phase_variant) {
        proj.rowwise() += p.phase[m - 1].transpose();
        return proj.array().cos().matrix();
    }
    Eigen::MatrixXd out(x.rows(), 2 * p.rff_dim);
    out.leftCols(p.rff_dim) = proj.array().cos().matrix();
    out.rightCols(p.rff_dim) = proj.array().sin().matrix();
    return out;
}

double rff_scale(const RandomFourierParams& p) {
    return p.phase_variant ? std::sqrt(2.0 / p.rff_dim) : 1.0 / std::sqrt(double(p.rff_dim));
}

// Scaled feature increments at level m, L x F.
Eigen::MatrixXd lifted_increments(const Sequence& s, const RandomFourierParams& p, int m) {
    const Eigen::MatrixXd f = lift_raw(s.values(), p, m) * rff_scale(p);
    const Eigen::Index L = f.rows() - 1;
    return f.bottomRows(L) - f.topRows(L);
}

void check_batch(const SequenceBatch& b, const RandomFourierParams& p, int M) {
    if (b.size() == 0) throw InputError("empty batch");
    if (M < 1 || M > p.levels) throw ConfigError("truncation exceeds sampled random feature levels");
    for (const auto& s : b.sequences)
        if (s.dim() != p.dim) throw ShapeError("random features expect dimension " + std::to_string(p.dim));
}

} // namespace

Eigen::VectorXd rff(const Eigen::VectorXd& x, const RandomFourierParams& params, int m) {
    Eigen::MatrixXd row = x.transpose();
    return (lift_raw(row, params, m) * rff_scale(params)).row(0).transpose();
}

Eigen::MatrixXd LevelFeatures::flatten() const {
    if (levels.empty()) return {};
    Eigen::Index cols = 0;
    for (const auto& l : levels) cols += l.cols();
    Eigen::MatrixXd out(levels[0].rows(), cols);
    Eigen::Index c = 0;
    for (const auto& l : levels) {
        out.middleCols(c, l.cols()) = l;
        c += l.cols();
    }
    return out;
}

std::vector<std::size_t> LevelFeatures::level_sizes() const {
    std::vector<std::size_t> s;
    for (const auto& l : levels) s.push_back(static_cast<std::size_t>(l.cols()));
    return s;
}

LevelFeatures rfsf(const SequenceBatch& batch, const RandomFourierParams& params, int M, int jobs) {
    check_batch(batch, params, M);
    const int F = params.feature_dim();
    check_capacity(F, M);
    const Eigen::Index N = static_cast<Eigen::Index>(batch.size());
    LevelFeatures out;
    for (int m = 0; m <= M; ++m) out.levels.emplace_back(N, static_cast<Eigen::Index>(ipow(F, m)));
    out.levels[0].setOnes();
    parallel_for(batch.size(), jobs, [&](std::size_t i) {
        std::vector<Eigen::MatrixXd> inc;
        for (int m = 1; m <= M; ++m) inc.push_back(lifted_increments(batch.sequences[i], params, m));
        std::vector<std::vector<double>> V(M + 1);
        V[0] = {1.0};
        for (int m = 1; m <= M; ++m) V[m].assign(ipow(F, m), 0.0);
        const Eigen::Index L = inc[0].rows();
        for (Eigen::Index t = 0; t < L; ++t)
            for (int m = M; m >= 1; --m) {
                const auto& lo = V[m - 1];
                auto& hi = V[m];
                const auto row = inc[m - 1].row(t);
                std::size_t k = 0;
                for (double a : lo)
                    for (Eigen::Index f = 0; f < F; ++f) hi[k++] += a * row(f);
            }
        for (int m = 1; m <= M; ++m)
            for (std::size_t k = 0; k < V[m].size(); ++k)
                out.levels[m](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = V[m][k];
    });
    return out;
}

LevelFeatures rfsf_dp(const SequenceBatch& batch, const RandomFourierParams& params, int M, int jobs) {
    check_batch(batch, params, M);
    if (params.phase_variant) throw ConfigError("diagonal projection uses cos/sin random features");
    const int D = params.rff_dim;
    const double scale = 1.0 / std::sqrt(double(D));
    const Eigen::Index N = static_cast<Eigen::Index>(batch.size());
    LevelFeatures out;
    for (int m = 0; m <= M; ++m) out.levels.emplace_back(N, static_cast<Eigen::Index>(D) << m);
    out.levels[0].setConstant(scale);
    parallel_for(batch.size(), jobs, [&](std::size_t i) {
        // Unscaled single-sample maps (cos, sin) per copy.
        std::vector<Eigen::MatrixXd> proj;
        for (int m = 1; m <= M; ++m) proj.push_back(batch.sequences[i].values() * params.omega[m - 1]);
        const Eigen::Index L = proj[0].rows() - 1;
        std::vector<double> V;
        std::vector<std::size_t> offset(M + 2, 0);
        for (int m = 0; m <= M; ++m) offset[m + 1] = offset[m] + (std::size_t(1) << m);
        for (int q = 0; q < D; ++q) {
            V.assign(offset[M + 1], 0.0);
            V[0] = 1.0;
            for (Eigen::Index t = 0; t < L; ++t)
                for (int m = M; m >= 1; --m) {
                    const double a1 = proj[m - 1](t + 1, q), a0 = proj[m - 1](t, q);
                    const double dc = std::cos(a1) - std::cos(a0);
                    const double ds = std::sin(a1) - std::sin(a0);
                    const std::size_t lo = offset[m - 1], hi = offset[m];
                    const std::size_t n = std::size_t(1) << (m - 1);
                    for (std::size_t k = 0; k < n; ++k) {
                        V[hi + 2 * k] += V[lo + k] * dc;
                        V[hi + 2 * k + 1] += V[lo + k] * ds;
                    }
                }
            for (int m = 1; m <= M; ++m) {
                const std::size_t n = std::size_t(1) << m;
                for (std::size_t k = 0; k < n; ++k)
                    out.levels[m](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q * n + k)) =
                        V[offset[m] + k] * scale;
            }
        }
    });
    return out;
}

TRPProjection sample_trp(int feature_dim, int rff_dim, int M, std::uint64_t seed) {
    if (feature_dim < 1 || rff_dim < 1 || M < 1) throw ConfigError("projection shapes must be positive");
    TRPProjection t;
    t.rff_dim = rff_dim;
    t.seed = seed;
    for (int m = 1; m <= M; ++m) {
        CounterRng rng(seed, static_cast<std::uint64_t>(m), CounterRng::projection);
        Eigen::MatrixXd P(feature_dim, rff_dim);
        for (int q = 0; q < rff_dim; ++q)
            for (int f = 0; f < feature_dim; ++f) P(f, q) = rng.normal(std::uint64_t(q) * feature_dim + f);
        t.proj.push_back(std::move(P));
    }
    return t;
}

Eigen::VectorXd trp_project(const Eigen::VectorXd& t, int m, const TRPProjection& proj) {
    if (m < 1 || m > static_cast<int>(proj.proj.size())) throw ShapeError("projection has too few levels");
    const Eigen::Index F = proj.proj[0].rows();
    if (static_cast<std::size_t>(t.size()) != ipow(static_cast<std::size_t>(F), m))
        throw ShapeError("tensor size does not match projection dimension");
    const int D = proj.rff_dim;
    Eigen::VectorXd out(D);
    for (int q = 0; q < D; ++q) {
        // Contract the leading index with p^(1), then the next with p^(2), ...
        Eigen::VectorXd cur = t;
        for (int k = 0; k < m; ++k) {
            const Eigen::Index rest = cur.size() / F;
            Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> view(
                cur.data(), F, rest);
            Eigen::VectorXd next = view.transpose() * proj.proj[k].col(q);
            cur = std::move(next);
        }
        out(q) = cur(0) / std::sqrt(double(D));
    }
    return out;
}

LevelFeatures rfsf_trp(const SequenceBatch& batch, const RandomFourierParams& params, const TRPProjection& proj,
                       int M, int jobs) {
    check_batch(batch, params, M);
    if (static_cast<int>(proj.proj.size()) < M) throw ShapeError("projection has too few levels");
    if (proj.proj[0].rows() != params.feature_dim()) throw ShapeError("projection does not match feature size");
    const int D = proj.rff_dim;
    const double scale = 1.0 / std::sqrt(double(D));
    const Eigen::Index N = static_cast<Eigen::Index>(batch.size());
    LevelFeatures out;
    out.levels.emplace_back(Eigen::MatrixXd::Ones(N, 1));
    for (int m = 1; m <= M; ++m) out.levels.emplace_back(N, D);
    parallel_for(batch.size(), jobs, [&](std::size_t i) {
        std::vector<Eigen::MatrixXd> U;
        for (int m = 1; m <= M; ++m) U.push_back(lifted_increments(batch.sequences[i], params, m) * proj.proj[m - 1]);
        const Eigen::Index L = U[0].rows();
        std::vector<Eigen::ArrayXd> V(M + 1, Eigen::ArrayXd::Zero(D));
        V[0].setOnes();
        for (Eigen::Index t = 0; t < L; ++t)
            for (int m = M; m >= 1; --m) V[m] += V[m - 1] * U[m - 1].row(t).transpose().array();
        for (int m = 1; m <= M; ++m) out.levels[m].row(static_cast<Eigen::Index>(i)) = V[m].matrix().transpose() * scale;
    });
    return out;
}

DecaySpec DecaySpec::uniform(int channels, double lambda, double q, int window) {
    DecaySpec s;
    s.lambda = Eigen::VectorXd::Constant(channels, lambda);
    s.frac_orders = Eigen::VectorXd::Constant(channels, q);
    s.window = window;
    return s;
}

std::vector<double> frac_diff_weights(double q, int window) {
    if (window < 1) throw ConfigError("differencing window must be >= 1");
    std::vector<double> w(window);
    w[0] = 1.0;
    for (int k = 1; k < window; ++k) w[k] = w[k - 1] * (double(k - 1) - q) / double(k);
    return w;
}

Eigen::MatrixXd frac_diff(const Eigen::MatrixXd& series, const Eigen::VectorXd& q, int window) {
    if (q.size() != series.cols()) throw ShapeError("need one differencing order per channel");
    const Eigen::Index T = series.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(T, series.cols());
    for (Eigen::Index c = 0; c < series.cols(); ++c) {
        const auto w = frac_diff_weights(q(c), window);
        for (Eigen::Index t = 0; t < T; ++t) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < window && k <= t; ++k) s += w[k] * series(t - k, c);
            out(t, c) = s;
        }
    }
    return out;
}

namespace {

void check_decay(const RandomFourierParams& p, const Eigen::VectorXd& frac_orders, int window, int M) {
    if (!p.phase_variant) throw ConfigError("decayed features use the phase random feature variant");
    if (M < 1 || M > p.levels) throw ConfigError("truncation exceeds sampled random feature levels");
    if (frac_orders.size() != p.rff_dim) throw ShapeError("need one differencing order per channel");
    for (Eigen::Index c = 0; c < frac_orders.size(); ++c)
        if (!(frac_orders(c) >= 0.0 && frac_orders(c) <= 1.0)) throw ConfigError("differencing order must lie in [0,1]");
    if (window < 1) throw ConfigError("differencing window must be >= 1");
}

// Differenced plain-cos lifts per factor position; entry m-1 is (L+1) x D.
std::vector<Eigen::MatrixXd> differenced_lifts(const Sequence& seq, const RandomFourierParams& p,
                                               const Eigen::VectorXd& frac_orders, int window, int M) {
    if (seq.dim() != p.dim) throw ShapeError("random features expect dimension " + std::to_string(p.dim));
    std::vector<Eigen::MatrixXd> out;
    for (int m = 1; m <= M; ++m) out.push_back(frac_diff(lift_raw(seq.values(), p, m), frac_orders, window));
    return out;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

} // namespace

std::vector<Eigen::MatrixXd> rfdsf(const Sequence& seq, const RandomFourierParams& params, const DecaySpec& decay,
                                   int M, int jobs) {
    check_decay(params, decay.frac_orders, decay.window, M);
    const int D = params.rff_dim;
    if (decay.lambda.size() != D) throw ShapeError("need one decay factor per channel");
    for (Eigen::Index c = 0; c < D; ++c)
        if (!(decay.lambda(c) > 0.0 && decay.lambda(c) <= 1.0)) throw DomainError("decay factors must lie in (0,1]");
    const auto dphi = differenced_lifts(seq, params, decay.frac_orders, decay.window, M);
    const Eigen::Index T = seq.values().rows();
    const Eigen::ArrayXXd lam = decay.lambda.transpose().array().replicate(T, 1);

    // Phi[m] over all steps, unscaled; Phi[0] = 1.
    std::vector<Eigen::ArrayXXd> Phi(M + 1);
    Phi[0] = Eigen::ArrayXXd::Ones(T, D);
    for (int m = 1; m <= M; ++m) {
        Eigen::ArrayXXd g = Eigen::ArrayXXd::Zero(T, D);
        Eigen::ArrayXXd prod = Eigen::ArrayXXd::Ones(T, D);
        for (int p = 1; p <= m; ++p) {
            prod *= dphi[m - p].array();
            // Phi_{m-p} one step back; zero before the start except for level 0.
            Eigen::ArrayXXd prev = Eigen::ArrayXXd::Zero(T, D);
            if (m - p == 0)
                prev.setOnes();
            else if (T > 1)
                prev.bottomRows(T - 1) = Phi[m - p].topRows(T - 1);
            g += prev * lam.pow(double(m - p)) * prod / factorial(p);
        }
        Phi[m] = linear_scan(lam.pow(double(m)), g, jobs);
    }
    std::vector<Eigen::MatrixXd> out;
    for (int m = 1; m <= M; ++m) out.push_back(Phi[m].matrix() * std::sqrt(std::pow(2.0, m) / D));
    return out;
}

std::vector<Eigen::MatrixXd> rfsf_stream(const Sequence& seq, const RandomFourierParams& params,
                                         const Eigen::VectorXd& frac_orders, int window, int M) {
    check_decay(params, frac_orders, window, M);
    const int D = params.rff_dim;
    const auto dphi = differenced_lifts(seq, params, frac_orders, window, M);
    const Eigen::Index T = seq.values().rows();
    std::vector<Eigen::MatrixXd> out(M, Eigen::MatrixXd(T, D));
    std::vector<Eigen::ArrayXd> S(M + 1, Eigen::ArrayXd::Zero(D));
    S[0].setOnes();
    for (Eigen::Index t = 0; t < T; ++t) {
        // Top down so S[m-p] still holds the previous step.
        for (int m = M; m >= 1; --m) {
            Eigen::ArrayXd prod = Eigen::ArrayXd::Ones(D);
            double fact = 1.0;
            for (int p = 1; p <= m; ++p) {
                prod *= dphi[m - p].row(t).transpose().array();
                fact *= p;
                S[m] += S[m - p] * prod / fact;
            }
        }
        for (int m = 1; m <= M; ++m) out[m - 1].row(t) = S[m].matrix().transpose() * std::sqrt(std::pow(2.0, m) / D);
    }
    return out;
}

std::vector<Eigen::VectorXd> normalize_levels(const std::vector<Eigen::VectorXd>& levels) {
    std::vector<Eigen::VectorXd> out;
    out.push_back(Eigen::VectorXd::Ones(1));
    for (const auto& l : levels) {
        const double n = l.norm();
        out.push_back(n < 1e-12 ? Eigen::VectorXd::Zero(l.size()) : Eigen::VectorXd(l / n));
    }
    return out;
}

void write_params(std::ostream& out, const RandomFourierParams& p) {
    out << "# seed=" << p.seed << " spec=rbf sigma=" << csv::format(p.sigma) << " dim=" << p.dim
        << " rff_dim=" << p.rff_dim << " levels=" << p.levels << " phase_variant=" << (p.phase_variant ? 1 : 0)
        << "\n";
    out << "kind,level,row,col,value\n";
    for (int c = 0; c < p.dim; ++c) out << "lengthscale,0," << c << ",0," << csv::format(p.lengthscales(c)) << "\n";
    for (int m = 1; m <= p.levels; ++m) {
        for (int c = 0; c < p.dim; ++c)
            for (int q = 0; q < p.rff_dim; ++q)
                out << "omega," << m << "," << c << "," << q << "," << csv::format(p.omega[m - 1](c, q)) << "\n";
        if (p.phase_variant)
            for (int q = 0; q < p.rff_dim; ++q)
                out << "phase," << m << ",0," << q << "," << csv::format(p.phase[m - 1](q)) << "\n";
    }
}

RandomFourierParams read_params(std::istream& in, const std::string& source) {
    std::string first;
    std::getline(in, first);
    if (first.rfind("# ", 0) != 0) throw InputError(source + ": missing parameter header line");
    RandomFourierParams p;
    std::istringstream meta(first.substr(2));
    std::string tok;
    bool seen[6] = {};
    while (meta >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
        if (k == "seed") p.seed = std::stoull(v), seen[0] = true;
        else if (k == "sigma") p.sigma = csv::to_double(v, source, 1, 1), seen[1] = true;
        else if (k == "dim") p.dim = std::stoi(v), seen[2] = true;
        else if (k == "rff_dim") p.rff_dim = std::stoi(v), seen[3] = true;
        else if (k == "levels") p.levels = std::stoi(v), seen[4] = true;
        else if (k == "phase_variant") p.phase_variant = v == "1", seen[5] = true;
        else if (k == "spec" && v != "rbf") throw UnsupportedError(source + ": only rbf parameters are supported");
    }
    for (bool s : seen)
        if (!s) throw InputError(source + ": incomplete parameter header");
    if (p.dim < 1 || p.rff_dim < 1 || p.levels < 1) throw InputError(source + ": bad parameter shape");
    p.lengthscales = Eigen::VectorXd::Constant(p.dim, std::nan(""));
    p.omega.assign(p.levels, Eigen::MatrixXd::Constant(p.dim, p.rff_dim, std::nan("")));
    if (p.phase_variant) p.phase.assign(p.levels, Eigen::VectorXd::Constant(p.rff_dim, std::nan("")));
    const auto t = csv::read(in, source);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const int line = t.line_numbers[r] + 1;
        if (row.size() != 5) throw InputError(source + ":" + std::to_string(line) + ": expected 5 columns");
        const long m = csv::to_long(row[1], source, line, 2);
        const long i = csv::to_long(row[2], source, line, 3);
        const long j = csv::to_long(row[3], source, line, 4);
        const double v = csv::to_double(row[4], source, line, 5);
        auto bad = [&] { throw InputError(source + ":" + std::to_string(line) + ": index out of range"); };
        if (row[0] == "lengthscale") {
            if (i < 0 || i >= p.dim) bad();
            p.lengthscales(i) = v;
        } else if (row[0] == "omega") {
            if (m < 1 || m > p.levels || i < 0 || i >= p.dim || j < 0 || j >= p.rff_dim) bad();
            p.omega[m - 1](i, j) = v;
        } else if (row[0] == "phase" && p.phase_variant) {
            if (m < 1 || m > p.levels || j < 0 || j >= p.rff_dim) bad();
            p.phase[m - 1](j) = v;
        } else {
            throw InputError(source + ":" + std::to_string(line) + ": unknown parameter kind '" + row[0] + "'");
        }
    }
    bool missing = p.lengthscales.hasNaN();
    for (const auto& w : p.omega) missing = missing || w.hasNaN();
    for (const auto& b : p.phase) missing = missing || b.hasNaN();
    if (missing) throw InputError(source + ": parameter file is missing entries");
    return p;
}

} // namespace sigkit
