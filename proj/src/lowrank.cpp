#include "sigkit/lowrank.hpp"

#include "sigkit/csv.hpp"
#include "sigkit/errors.hpp"
#include "sigkit/parallel.hpp"
#include "sigkit/rng.hpp"
#include "sigkit/sigfeatures.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace sigkit {

LS2TWeights::Variant parse_ls2t_variant(const std::string& s) {
    if (s == "independent") return LS2TWeights::Variant::independent;
    if (s == "recursive") return LS2TWeights::Variant::recursive;
    throw ConfigError("unknown LS2T variant '" + s + "'");
}

const char* ls2t_variant_name(LS2TWeights::Variant v) {
    return v == LS2TWeights::Variant::independent ? "independent" : "recursive";
}

void LS2TWeights::validate() const {
    if (width < 1 || trunc < 1 || dim < 1) throw ShapeError("LS2T weights need width, trunc, dim >= 1");
    if (static_cast<int>(z.size()) != trunc) throw ShapeError("LS2T weights have wrong number of levels");
    for (int m = 1; m <= trunc; ++m) {
        const std::size_t expect = variant == Variant::independent ? m : 1;
        if (z[m - 1].size() != expect) throw ShapeError("LS2T weights have wrong number of components");
        for (const auto& mat : z[m - 1])
            if (mat.rows() != width || mat.cols() != dim) throw ShapeError("LS2T weight matrix has wrong shape");
    }
}

Rank1Element LS2TWeights::functional(int j) const {
    Rank1Element r = Rank1Element::zeros(dim, trunc, 1.0);
    for (int m = 1; m <= trunc; ++m)
        for (int k = 0; k < m; ++k) {
            const auto& mat = variant == Variant::independent ? z[m - 1][k] : z[k][0];
            r.components[m - 1][k] = mat.row(j).transpose();
        }
    return r;
}

LS2TWeights LS2TWeights::tied_independent() const {
    if (variant == Variant::independent) return *this;
    LS2TWeights w = *this;
    w.variant = Variant::independent;
    for (int m = 1; m <= trunc; ++m) {
        w.z[m - 1].clear();
        for (int k = 0; k < m; ++k) w.z[m - 1].push_back(z[k][0]);
    }
    return w;
}

LS2TWeights init_ls2t_weights(LS2TWeights::Variant v, int width, int M, int d, std::uint64_t seed) {
    LS2TWeights w;
    w.variant = v;
    w.width = width;
    w.trunc = M;
    w.dim = d;
    const double a = std::sqrt(3.0 / double(d));
    for (int m = 1; m <= M; ++m) {
        const int comps = v == LS2TWeights::Variant::independent ? m : 1;
        std::vector<Eigen::MatrixXd> level;
        for (int k = 0; k < comps; ++k) {
            CounterRng rng(seed, static_cast<std::uint64_t>(m * 64 + k), CounterRng::weights);
            Eigen::MatrixXd mat(width, d);
            for (int j = 0; j < width; ++j)
                for (int c = 0; c < d; ++c) mat(j, c) = a * (2.0 * rng.uniform(std::uint64_t(j) * d + c) - 1.0);
            level.push_back(std::move(mat));
        }
        w.z.push_back(std::move(level));
    }
    w.validate();
    return w;
}

namespace {

// Row t gets h(t-1); row 0 gets zero.
Eigen::ArrayXXd shift_down(const Eigen::ArrayXXd& h) {
    Eigen::ArrayXXd s = Eigen::ArrayXXd::Zero(h.rows(), h.cols());
    if (h.rows() > 1) s.bottomRows(h.rows() - 1) = h.topRows(h.rows() - 1);
    return s;
}

// Order-1 chain: h_1 = cumsum(c_1), h_k = cumsum(shift(h_{k-1}) * c_k).
Eigen::ArrayXXd chain(const Eigen::MatrixXd& dx, const std::vector<const Eigen::MatrixXd*>& mats, int jobs,
                      std::vector<Eigen::ArrayXXd>* every) {
    Eigen::ArrayXXd h;
    for (std::size_t k = 0; k < mats.size(); ++k) {
        const Eigen::ArrayXXd c = (dx * mats[k]->transpose()).array();
        h = k == 0 ? prefix_sum(c, jobs) : prefix_sum(shift_down(h) * c, jobs);
        if (every) every->push_back(h);
    }
    return h;
}

SequenceBatch prepared(const SequenceBatch& batch, const LS2TWeights& w) {
    w.validate();
    SequenceBatch b = tabulate(batch);
    if (b.dim() != w.dim) throw ShapeError("LS2T weights expect dimension " + std::to_string(w.dim));
    return b;
}

} // namespace

LS2TOutput ls2t_independent(const SequenceBatch& batch, const LS2TWeights& w, int jobs) {
    if (w.variant != LS2TWeights::Variant::independent) throw ConfigError("expected independent LS2T weights");
    const SequenceBatch b = prepared(batch, w);
    LS2TOutput out(w.trunc, std::vector<Eigen::MatrixXd>(b.size()));
    const int inner_jobs = b.size() == 1 ? jobs : 1;
    parallel_for(b.size(), jobs, [&](std::size_t i) {
        const Eigen::MatrixXd dx = increments(b.sequences[i]);
        for (int m = 1; m <= w.trunc; ++m) {
            std::vector<const Eigen::MatrixXd*> mats;
            for (const auto& z : w.z[m - 1]) mats.push_back(&z);
            out[m - 1][i] = chain(dx, mats, inner_jobs, nullptr).matrix();
        }
    });
    return out;
}

LS2TOutput ls2t_recursive(const SequenceBatch& batch, const LS2TWeights& w, int jobs) {
    if (w.variant != LS2TWeights::Variant::recursive) throw ConfigError("expected recursive LS2T weights");
    const SequenceBatch b = prepared(batch, w);
    LS2TOutput out(w.trunc, std::vector<Eigen::MatrixXd>(b.size()));
    const int inner_jobs = b.size() == 1 ? jobs : 1;
    parallel_for(b.size(), jobs, [&](std::size_t i) {
        const Eigen::MatrixXd dx = increments(b.sequences[i]);
        std::vector<const Eigen::MatrixXd*> mats;
        for (const auto& z : w.z) mats.push_back(&z[0]);
        std::vector<Eigen::ArrayXXd> every;
        chain(dx, mats, inner_jobs, &every);
        for (int m = 1; m <= w.trunc; ++m) out[m - 1][i] = every[m - 1].matrix();
    });
    return out;
}

LS2TOutput ls2t(const SequenceBatch& batch, const LS2TWeights& w, int jobs) {
    return w.variant == LS2TWeights::Variant::independent ? ls2t_independent(batch, w, jobs)
                                                          : ls2t_recursive(batch, w, jobs);
}

std::vector<double> rank1_oracle(const Sequence& seq, const Rank1Element& ell) {
    if (seq.length() > 12 || ell.M > 4) throw CapacityError("rank-1 oracle limited to L <= 12 and M <= 4");
    std::vector<double> out(ell.M + 1, 0.0);
    out[0] = ell.scalar;
    if (ell.M == 0) return out;
    SignatureConfig cfg;
    cfg.trunc = ell.M;
    cfg.order = 1;
    const auto sig = signature(seq, cfg);
    const auto dense = densify(ell);
    if (dense.dim() != sig.dim()) throw ShapeError("functional and sequence differ in dimension");
    for (int m = 1; m <= ell.M; ++m) {
        double s = 0.0;
        for (std::size_t k = 0; k < sig.level(m).size(); ++k) s += sig.level(m)[k] * dense.level(m)[k];
        out[m] = s;
    }
    return out;
}

void write_ls2t_weights(std::ostream& out, const LS2TWeights& w) {
    w.validate();
    out << "variant,width,trunc,dim\n";
    out << ls2t_variant_name(w.variant) << "," << w.width << "," << w.trunc << "," << w.dim << "\n";
    out << "functional,level,component";
    for (int c = 0; c < w.dim; ++c) out << ",c" << c;
    out << "\n";
    for (int j = 0; j < w.width; ++j)
        for (int m = 1; m <= w.trunc; ++m)
            for (std::size_t k = 0; k < w.z[m - 1].size(); ++k) {
                out << j << "," << m << "," << k + 1;
                for (int c = 0; c < w.dim; ++c) out << "," << csv::format(w.z[m - 1][k](j, c));
                out << "\n";
            }
}

LS2TWeights read_ls2t_weights(std::istream& in, const std::string& source) {
    std::string line;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty() && line[0] != '#') return true;
        }
        return false;
    };
    if (!next_line() || line != "variant,width,trunc,dim") throw InputError(source + ": expected weight header");
    if (!next_line()) throw InputError(source + ": missing weight shape line");
    std::istringstream meta(line);
    std::string variant, width, trunc, dim;
    std::getline(meta, variant, ',');
    std::getline(meta, width, ',');
    std::getline(meta, trunc, ',');
    std::getline(meta, dim, ',');
    LS2TWeights w;
    w.variant = parse_ls2t_variant(variant);
    w.width = static_cast<int>(csv::to_long(width, source, 2, 2));
    w.trunc = static_cast<int>(csv::to_long(trunc, source, 2, 3));
    w.dim = static_cast<int>(csv::to_long(dim, source, 2, 4));
    if (w.width < 1 || w.trunc < 1 || w.dim < 1) throw InputError(source + ": weight shape must be positive");
    for (int m = 1; m <= w.trunc; ++m)
        w.z.emplace_back(w.variant == LS2TWeights::Variant::independent ? m : 1,
                         Eigen::MatrixXd::Constant(w.width, w.dim, std::nan("")));
    std::stringstream rest;
    rest << in.rdbuf();
    const auto t = csv::read(rest, source);
    if (static_cast<int>(t.header.size()) != 3 + w.dim) throw InputError(source + ": weight rows need 3+dim columns");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const int line_no = t.line_numbers[r] + 2;
        const auto& row = t.rows[r];
        const long j = csv::to_long(row[0], source, line_no, 1);
        const long m = csv::to_long(row[1], source, line_no, 2);
        const long k = csv::to_long(row[2], source, line_no, 3);
        if (j < 0 || j >= w.width || m < 1 || m > w.trunc || k < 1 ||
            k > static_cast<long>(w.z[m - 1].size()))
            throw InputError(source + ":" + std::to_string(line_no) + ": weight index out of range");
        for (int c = 0; c < w.dim; ++c) w.z[m - 1][k - 1](j, c) = csv::to_double(row[3 + c], source, line_no, 4 + c);
    }
    for (const auto& level : w.z)
        for (const auto& mat : level)
            if (mat.hasNaN()) throw InputError(source + ": weight file is missing entries");
    return w;
}

LS2TWeights read_ls2t_weights_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return read_ls2t_weights(in, path);
}

} // namespace sigkit
