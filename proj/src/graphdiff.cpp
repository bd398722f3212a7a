#include "sigkit/graphdiff.hpp"

#include "sigkit/csv.hpp"
#include "sigkit/errors.hpp"
#include "sigkit/parallel.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>

namespace sigkit {

void Graph::validate() const {
    const int n = num_nodes();
    if (static_cast<int>(node_ids.size()) != n && !node_ids.empty()) throw ShapeError("node id count mismatch");
    for (const auto& e : edges) {
        if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) throw InputError("edge endpoint out of range");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) throw InputError("edge weights must be positive");
    }
}

Eigen::SparseMatrix<double, Eigen::RowMajor> transition_matrix(const Graph& g) {
    g.validate();
    const int n = g.num_nodes();
    std::vector<double> out_weight(n, 0.0);
    for (const auto& e : g.edges) out_weight[e.src] += e.weight;
    std::vector<Eigen::Triplet<double>> trips;
    for (const auto& e : g.edges) trips.emplace_back(e.src, e.dst, e.weight / out_weight[e.src]);
    Eigen::SparseMatrix<double, Eigen::RowMajor> P(n, n);
    P.setFromTriplets(trips.begin(), trips.end());
    return P;
}

namespace {

std::vector<double> step_coefficients(const WalkFeatureConfig& cfg) {
    if (!cfg.coefficients.empty()) {
        if (static_cast<int>(cfg.coefficients.size()) != cfg.trunc + 1)
            throw ConfigError("need trunc+1 step coefficients");
        return cfg.coefficients;
    }
    std::vector<double> c(cfg.trunc + 1, 1.0);
    for (int r = 1; r <= cfg.trunc; ++r) c[r] = c[r - 1] / r;
    return c;
}

void check_config(const Graph& g, const WalkFeatureConfig& cfg) {
    g.validate();
    if (g.num_nodes() == 0) throw InputError("graph has no nodes");
    if (cfg.walk_length < 0 || cfg.trunc < 1) throw ConfigError("walk length must be >= 0 and trunc >= 1");
    if (cfg.functionals.empty()) throw ConfigError("at least one functional is required");
    for (const auto& f : cfg.functionals) {
        if (f.M != cfg.trunc) throw ShapeError("functional truncation does not match config");
        if (f.dim() != g.dim()) throw ShapeError("functional dimension does not match node features");
    }
}

} // namespace

NodeFeatures hypoelliptic_features(const Graph& g, const WalkFeatureConfig& cfg) {
    check_config(g, cfg);
    const auto P = transition_matrix(g);
    const auto c = step_coefficients(cfg);
    const int n = g.num_nodes(), M = cfg.trunc, k = cfg.walk_length;
    std::vector<bool> sink(n, true);
    for (const auto& e : g.edges) sink[e.src] = false;

    NodeFeatures out(cfg.functionals.size(), Eigen::MatrixXd::Zero(n, M + 1));
    parallel_for(cfg.functionals.size(), cfg.jobs, [&](std::size_t fi) {
        const auto& ell = cfg.functionals[fi];
        auto& res = out[fi];
        res.col(0).setConstant(ell.scalar);
        if (k == 0) return;
        for (int m = 1; m <= M; ++m) {
            // proj(i, t) = <v_{m,t}, f(i)>
            Eigen::MatrixXd comp(g.dim(), m);
            for (int t = 0; t < m; ++t) comp.col(t) = ell.components[m - 1][t];
            const Eigen::MatrixXd proj = g.features * comp;
            // h.col(s) holds suffix contractions starting at component s (0-based); col m is the empty suffix.
            Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, m + 1);
            h.col(m).setOnes();
            for (int step = 0; step < k; ++step) {
                Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n, m + 1);
                next.col(m).setOnes();
                for (int i = 0; i < n; ++i) {
                    if (sink[i]) {
                        next.row(i) = h.row(i);
                        continue;
                    }
                    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(P, i); it; ++it) {
                        const int j = static_cast<int>(it.col());
                        Eigen::RowVectorXd z = proj.row(j);
                        if (cfg.increments) z -= proj.row(i);
                        for (int s = 0; s < m; ++s) {
                            double acc = 0.0, prod = 1.0;
                            for (int r = 0; s + r <= m; ++r) {
                                if (r > 0) prod *= z(s + r - 1);
                                acc += c[r] * prod * h(j, s + r);
                            }
                            next(i, s) += it.value() * acc;
                        }
                    }
                }
                h = std::move(next);
            }
            for (int i = 0; i < n; ++i) {
                if (cfg.zero_start || !cfg.increments) {
                    double acc = 0.0, prod = 1.0;
                    for (int r = 0; r <= m; ++r) {
                        if (r > 0) prod *= proj(i, r - 1);
                        acc += c[r] * prod * h(i, r);
                    }
                    res(i, m) = acc;
                } else {
                    res(i, m) = h(i, 0);
                }
            }
        }
    });
    return out;
}

NodeFeatures walk_oracle(const Graph& g, const WalkFeatureConfig& cfg) {
    check_config(g, cfg);
    const int n = g.num_nodes(), M = cfg.trunc, k = cfg.walk_length, d = g.dim();
    if (n > 8 || k > 4) throw CapacityError("walk oracle limited to n <= 8 and k <= 4");
    const auto c = step_coefficients(cfg);
    std::vector<double> out_weight(n, 0.0);
    for (const auto& e : g.edges) out_weight[e.src] += e.weight;

    // Dense lift sum_r c_r z^{(x) r}.
    auto lift = [&](const Eigen::VectorXd& z) {
        TruncatedTensorSeries t = tensor_exp(z, M);
        double fact = 1.0;
        for (int r = 0; r <= M; ++r) {
            if (r > 0) fact *= r;
            for (auto& x : t.level(r)) x *= c[r] * fact;
        }
        return t;
    };

    std::vector<TruncatedTensorSeries> expected(n, TruncatedTensorSeries(d, M));
    for (int start = 0; start < n; ++start) {
        std::function<void(int, int, double, const TruncatedTensorSeries&)> walk =
            [&](int node, int depth, double prob, const TruncatedTensorSeries& acc) {
                if (depth == k) {
                    for (int m = 0; m <= M; ++m)
                        for (std::size_t q = 0; q < acc.level(m).size(); ++q)
                            expected[start].level(m)[q] += prob * acc.level(m)[q];
                    return;
                }
                if (out_weight[node] == 0.0) {
                    walk(node, depth + 1, prob, acc);
                    return;
                }
                for (const auto& e : g.edges) {
                    if (e.src != node) continue;
                    Eigen::VectorXd z = g.features.row(e.dst).transpose();
                    if (cfg.increments) z -= g.features.row(node).transpose();
                    walk(e.dst, depth + 1, prob * e.weight / out_weight[node], algebra_mul(acc, lift(z)));
                }
            };
        TruncatedTensorSeries init = TruncatedTensorSeries::unit(d, M);
        if (k > 0 && (cfg.zero_start || !cfg.increments)) init = lift(g.features.row(start).transpose());
        if (k == 0) {
            expected[start] = init;
        } else {
            walk(start, 0, 1.0, init);
        }
    }

    NodeFeatures out;
    for (const auto& ell : cfg.functionals) {
        const auto dense = densify(ell);
        Eigen::MatrixXd res = Eigen::MatrixXd::Zero(n, M + 1);
        for (int i = 0; i < n; ++i) {
            res(i, 0) = ell.scalar;
            if (k == 0) continue;
            for (int m = 1; m <= M; ++m) {
                double s = 0.0;
                for (std::size_t q = 0; q < dense.level(m).size(); ++q) s += dense.level(m)[q] * expected[i].level(m)[q];
                res(i, m) = s;
            }
        }
        out.push_back(std::move(res));
    }
    return out;
}

std::vector<Eigen::RowVectorXd> mean_pool(const NodeFeatures& values) {
    std::vector<Eigen::RowVectorXd> out;
    for (const auto& v : values) {
        if (v.rows() == 0) throw InputError("cannot pool an empty graph");
        out.push_back(v.colwise().mean());
    }
    if (out.empty()) throw InputError("nothing to pool");
    return out;
}

Graph read_graph(std::istream& edges, std::istream& nodes, bool undirected) {
    const std::string nsrc = "node csv", esrc = "edge csv";
    const auto nt = csv::read(nodes, nsrc);
    if (nt.header.size() < 2 || nt.header[0] != "node") throw InputError(nsrc + ": header must be node,c0,...");
    const int d = static_cast<int>(nt.header.size()) - 1;
    Graph g;
    g.features.resize(static_cast<Eigen::Index>(nt.rows.size()), d);
    std::map<std::string, int> index;
    for (std::size_t r = 0; r < nt.rows.size(); ++r) {
        const auto& row = nt.rows[r];
        if (!index.emplace(row[0], static_cast<int>(r)).second)
            throw InputError(nsrc + ":" + std::to_string(nt.line_numbers[r]) + ":1: duplicate node '" + row[0] + "'");
        g.node_ids.push_back(row[0]);
        for (int c = 0; c < d; ++c)
            g.features(static_cast<Eigen::Index>(r), c) = csv::to_double(row[c + 1], nsrc, nt.line_numbers[r], c + 2);
    }
    if (g.node_ids.empty()) throw InputError(nsrc + ": graph has no nodes");
    const auto et = csv::read(edges, esrc);
    if (et.header.size() < 2 || et.header.size() > 3 || et.header[0] != "src" || et.header[1] != "dst")
        throw InputError(esrc + ": header must be src,dst[,weight]");
    for (std::size_t r = 0; r < et.rows.size(); ++r) {
        const auto& row = et.rows[r];
        const int line = et.line_numbers[r];
        Edge e;
        for (int col = 0; col < 2; ++col) {
            auto it = index.find(row[col]);
            if (it == index.end())
                throw InputError(esrc + ":" + std::to_string(line) + ":" + std::to_string(col + 1) +
                                 ": dangling node reference '" + row[col] + "'");
            (col == 0 ? e.src : e.dst) = it->second;
        }
        if (et.header.size() == 3) e.weight = csv::to_double(row[2], esrc, line, 3);
        if (!(e.weight > 0.0))
            throw InputError(esrc + ":" + std::to_string(line) + ":3: edge weight must be positive");
        g.edges.push_back(e);
        if (undirected && e.src != e.dst) g.edges.push_back({e.dst, e.src, e.weight});
    }
    return g;
}

Graph read_graph(const std::string& edge_path, const std::string& node_path, bool undirected) {
    std::ifstream e(edge_path), n(node_path);
    if (!e) throw InputError("cannot open " + edge_path);
    if (!n) throw InputError("cannot open " + node_path);
    try {
        return read_graph(e, n, undirected);
    } catch (const InputError& err) {
        throw InputError(std::string(err.what()) + " (" + edge_path + ", " + node_path + ")");
    }
}

} // namespace sigkit
