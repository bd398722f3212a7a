#include "sigkit/cli.hpp"

#include "sigkit/csv.hpp"
#include "sigkit/errors.hpp"
#include "sigkit/graphdiff.hpp"
#include "sigkit/lowrank.hpp"
#include "sigkit/randomfeatures.hpp"
#include "sigkit/rng.hpp"
#include "sigkit/seqdata.hpp"
#include "sigkit/sigfeatures.hpp"
#include "sigkit/sigkernels.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace sigkit::cli {

std::string JobConfig::str(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

std::string JobConfig::required(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end() || it->second.empty()) throw ConfigError("missing required option --" + key);
    return it->second;
}

long JobConfig::integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    try {
        std::size_t used = 0;
        const long v = std::stol(values.at(key), &used);
        if (used == values.at(key).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("option " + key + " expects an integer, got '" + values.at(key) + "'");
}

double JobConfig::real(const std::string& key, double fallback) const {
    return maybe_real(key).value_or(fallback);
}

std::optional<double> JobConfig::maybe_real(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(values.at(key), &used);
        if (used == values.at(key).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("option " + key + " expects a number, got '" + values.at(key) + "'");
}

bool JobConfig::flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = values.at(key);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("option " + key + " expects true or false, got '" + v + "'");
}

void JobConfig::merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        values.emplace(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void write_metadata(const std::string& output, const JobConfig& cfg) {
    std::ofstream out(output + ".meta");
    if (!out) throw InputError("cannot write " + output + ".meta");
    for (const auto& [k, v] : cfg.values) out << k << "=" << v << "\n";
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    return out;
}

void write_row(std::ostream& out, const std::string& id, const std::string* step, const Eigen::RowVectorXd& v) {
    out << id;
    if (step) out << "," << *step;
    for (Eigen::Index k = 0; k < v.size(); ++k) out << "," << csv::format(v(k));
    out << "\n";
}

void write_header(std::ostream& out, bool with_step, const std::vector<std::string>& names) {
    out << "id";
    if (with_step) out << ",step";
    for (const auto& n : names) out << "," << n;
    out << "\n";
}

StaticKernelSpec static_spec(const JobConfig& cfg, const std::string& fallback_kind) {
    StaticKernelSpec s;
    s.kind = parse_static_kind(cfg.str("static", fallback_kind));
    if (cfg.has("sigma") && cfg.has("alpha")) throw ConfigError("give either --sigma or --alpha, not both");
    s.sigma = cfg.real("sigma", 1.0);
    if (cfg.has("alpha")) s.alpha = cfg.real("alpha", 1.0);
    if (s.kind == StaticKernelSpec::Kind::rbf && !(s.sigma > 0.0)) throw ConfigError("sigma must be positive");
    return s;
}

std::uint64_t seed_of(const JobConfig& cfg) {
    const long s = cfg.integer("seed", 0);
    if (s < 0) throw ConfigError("seed must be nonnegative");
    return static_cast<std::uint64_t>(s);
}

int jobs_of(const JobConfig& cfg) {
    const long j = cfg.integer("jobs", 1);
    if (j < 1) throw ConfigError("jobs must be >= 1");
    return static_cast<int>(j);
}

int default_rff_dim(const std::string& mode, int M) {
    if (mode == "rfsf-dp") return std::max(1, static_cast<int>(std::lround(1000.0 / ((1 << (M + 1)) - 1))));
    if (mode == "rfsf") {
        int F = 2;
        auto total = [&](int f) {
            double t = 0.0;
            for (int m = 1; m <= M; ++m) t += std::pow(double(f), m);
            return t;
        };
        while (total(F + 2) <= 1000.0) F += 2;
        return F / 2;
    }
    return std::max(1, static_cast<int>(std::lround(1000.0 / M)));
}

std::vector<Eigen::VectorXd> split_levels(const Eigen::RowVectorXd& row, const std::vector<std::size_t>& sizes,
                                          std::size_t first) {
    std::vector<Eigen::VectorXd> out;
    Eigen::Index c = 0;
    for (std::size_t m = 0; m < sizes.size(); ++m) {
        if (m >= first) out.push_back(row.segment(c, static_cast<Eigen::Index>(sizes[m])).transpose());
        c += static_cast<Eigen::Index>(sizes[m]);
    }
    return out;
}

Eigen::RowVectorXd join_levels(const std::vector<Eigen::VectorXd>& levels) {
    Eigen::Index n = 0;
    for (const auto& l : levels) n += l.size();
    Eigen::RowVectorXd out(n);
    Eigen::Index c = 0;
    for (const auto& l : levels) {
        out.segment(c, l.size()) = l.transpose();
        c += l.size();
    }
    return out;
}

} // namespace

int cmd_features(JobConfig cfg) {
    const std::string input = cfg.required("input");
    const std::string output = cfg.required("output");
    const std::string mode = cfg.str("mode", "sig");
    const int M = static_cast<int>(cfg.integer("trunc", 4));
    const int p = static_cast<int>(cfg.integer("order", 1));
    const int jobs = jobs_of(cfg);
    const bool normalize = cfg.flag("normalize");
    const auto augs = parse_augmentations(cfg.str("augment", ""));
    cfg.values["mode"] = mode;
    cfg.values["trunc"] = std::to_string(M);
    cfg.values["order"] = std::to_string(p);
    cfg.values["augment"] = format_augmentations(augs);
    cfg.values["normalize"] = normalize ? "true" : "false";

    SequenceBatch batch = augment(read_batch_csv_file(input), augs);
    const SequenceBatch tab = tabulate(batch);
    cfg.values["num_sequences"] = std::to_string(batch.size());
    cfg.values["dim"] = std::to_string(batch.dim());
    auto out = open_out(output);

    if (mode == "sig" || mode == "sig-stream") {
        SignatureConfig sc;
        sc.trunc = M;
        sc.order = p;
        sc.normalize_levels = normalize;
        sc.validate();
        check_capacity(batch.dim(), M);
        std::vector<std::size_t> sizes;
        for (int m = 0; m <= M; ++m) sizes.push_back(ipow(batch.dim(), m));
        write_header(out, mode == "sig-stream", level_column_names(sizes));
        if (mode == "sig") {
            const Eigen::MatrixXd f = signature_features(batch, sc, jobs);
            for (std::size_t i = 0; i < batch.size(); ++i) write_row(out, batch.ids[i], nullptr, f.row(static_cast<Eigen::Index>(i)));
        } else {
            for (std::size_t i = 0; i < batch.size(); ++i) {
                const auto stream = signature_stream(batch.sequences[i], sc);
                for (std::size_t l = 0; l < stream.size(); ++l) {
                    const auto flat = stream[l].flatten();
                    const std::string step = std::to_string(l);
                    write_row(out, batch.ids[i], &step,
                              Eigen::Map<const Eigen::RowVectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size())));
                }
            }
        }
    } else if (mode == "ls2t") {
        LS2TWeights w;
        if (cfg.has("weights")) {
            w = read_ls2t_weights_file(cfg.str("weights", ""));
        } else {
            w = init_ls2t_weights(parse_ls2t_variant(cfg.str("variant", "independent")),
                                  static_cast<int>(cfg.integer("width", 8)), M, batch.dim(), seed_of(cfg));
            cfg.values["seed"] = std::to_string(seed_of(cfg));
            cfg.values["width"] = std::to_string(w.width);
        }
        cfg.values["variant"] = ls2t_variant_name(w.variant);
        if (w.trunc != M) throw ConfigError("weight file truncation differs from --trunc");
        const auto Y = ls2t(batch, w, jobs);
        const bool stream = cfg.flag("stream");
        std::vector<std::size_t> sizes{0};
        for (int m = 1; m <= M; ++m) sizes.push_back(static_cast<std::size_t>(w.width));
        auto names = level_column_names(sizes);
        write_header(out, stream, names);
        const int L = tab.sequences[0].length();
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const int first = stream ? 1 : L;
            for (int l = first; l <= L; ++l) {
                Eigen::RowVectorXd row(M * w.width);
                for (int m = 1; m <= M; ++m)
                    row.segment((m - 1) * w.width, w.width) =
                        L == 0 ? Eigen::RowVectorXd::Zero(w.width) : Eigen::RowVectorXd(Y[m - 1][i].row(l - 1));
                const std::string step = std::to_string(l);
                write_row(out, batch.ids[i], stream ? &step : nullptr, row);
            }
            if (L == 0 && !stream) write_row(out, batch.ids[i], nullptr, Eigen::RowVectorXd::Zero(M * w.width));
        }
    } else if (mode == "rfsf" || mode == "rfsf-dp" || mode == "rfsf-trp" || mode == "rfsf-stream" || mode == "rfdsf") {
        StaticKernelSpec spec = static_spec(cfg, "rbf");
        if (spec.alpha) spec.sigma = median_bandwidth(batch, *spec.alpha);
        cfg.values["static"] = static_kind_name(spec.kind);
        cfg.values["sigma_resolved"] = csv::format(spec.sigma);
        const int D = static_cast<int>(cfg.integer("rff-dim", default_rff_dim(mode, M)));
        cfg.values["rff-dim"] = std::to_string(D);
        const std::uint64_t seed = seed_of(cfg);
        cfg.values["seed"] = std::to_string(seed);
        const bool phase = mode == "rfsf-stream" || mode == "rfdsf";
        const auto params = sample_params(spec, batch.dim(), D, M, seed, phase);
        if (cfg.has("params-out")) {
            auto po = open_out(cfg.str("params-out", ""));
            write_params(po, params);
        }
        if (!phase) {
            LevelFeatures lf;
            if (mode == "rfsf")
                lf = rfsf(batch, params, M, jobs);
            else if (mode == "rfsf-dp")
                lf = rfsf_dp(batch, params, M, jobs);
            else
                lf = rfsf_trp(batch, params, sample_trp(params.feature_dim(), D, M, seed), M, jobs);
            const auto sizes = lf.level_sizes();
            const Eigen::MatrixXd f = lf.flatten();
            write_header(out, false, level_column_names(sizes));
            for (std::size_t i = 0; i < batch.size(); ++i) {
                Eigen::RowVectorXd row = f.row(static_cast<Eigen::Index>(i));
                if (normalize) {
                    auto levels = normalize_levels(split_levels(row, sizes, 1));
                    if (mode == "rfsf-dp") levels[0] = Eigen::VectorXd::Constant(D, 1.0 / std::sqrt(double(D)));
                    row = join_levels(levels);
                }
                write_row(out, batch.ids[i], nullptr, row);
            }
        } else {
            const double q = cfg.real("frac-order", 1.0);
            const int W = static_cast<int>(cfg.integer("window", 32));
            const double lambda = mode == "rfdsf" ? cfg.real("decay", 1.0) : 1.0;
            cfg.values["frac-order"] = csv::format(q);
            cfg.values["window"] = std::to_string(W);
            if (mode == "rfdsf") cfg.values["decay"] = csv::format(lambda);
            const auto decay = DecaySpec::uniform(D, lambda, q, W);
            std::vector<std::size_t> sizes;
            if (normalize) sizes.push_back(1);
            else sizes.push_back(0);
            for (int m = 1; m <= M; ++m) sizes.push_back(static_cast<std::size_t>(D));
            write_header(out, true, level_column_names(sizes));
            for (std::size_t i = 0; i < batch.size(); ++i) {
                const auto levels = mode == "rfdsf" ? rfdsf(batch.sequences[i], params, decay, M, jobs)
                                                    : rfsf_stream(batch.sequences[i], params, decay.frac_orders, W, M);
                for (Eigen::Index l = 0; l < levels[0].rows(); ++l) {
                    std::vector<Eigen::VectorXd> per;
                    for (const auto& lv : levels) per.push_back(lv.row(l).transpose());
                    if (normalize) per = normalize_levels(per);
                    const std::string step = std::to_string(l);
                    write_row(out, batch.ids[i], &step, join_levels(per));
                }
            }
        }
    } else {
        throw ConfigError("unknown mode '" + mode + "'");
    }
    out.close();
    write_metadata(output, cfg);
    return 0;
}

int cmd_gram(JobConfig cfg) {
    const std::string output = cfg.required("output");
    const SequenceBatch X = read_batch_csv_file(cfg.required("input"));
    const SequenceBatch Y = cfg.has("input2") ? read_batch_csv_file(cfg.str("input2", "")) : X;
    GramConfig gc;
    gc.trunc = static_cast<int>(cfg.integer("trunc", 4));
    gc.order = static_cast<int>(cfg.integer("order", 1));
    gc.static_kernel = static_spec(cfg, "linear");
    gc.normalize = cfg.flag("normalize");
    gc.augmentations = parse_augmentations(cfg.str("augment", ""));
    gc.cell_cap = cfg.real("cell-cap", 1e9);
    gc.jobs = jobs_of(cfg);
    const auto res = gram(X, Y, gc);
    cfg.values["trunc"] = std::to_string(gc.trunc);
    cfg.values["order"] = std::to_string(gc.order);
    cfg.values["static"] = static_kind_name(gc.static_kernel.kind);
    if (gc.static_kernel.kind == StaticKernelSpec::Kind::rbf) cfg.values["sigma_resolved"] = csv::format(res.sigma);
    cfg.values["normalize"] = gc.normalize ? "true" : "false";
    cfg.values["augment"] = format_augmentations(gc.augmentations);

    auto write_matrix = [&](const std::string& path, const Eigen::MatrixXd& K) {
        auto out = open_out(path);
        out << "id";
        for (const auto& id : Y.ids) out << "," << id;
        out << "\n";
        for (Eigen::Index i = 0; i < K.rows(); ++i) write_row(out, X.ids[static_cast<std::size_t>(i)], nullptr, K.row(i));
    };
    write_matrix(output, res.combined);
    if (cfg.flag("per-level"))
        for (int m = 1; m <= gc.trunc; ++m) write_matrix(output + ".level" + std::to_string(m) + ".csv", res.levels[m]);
    write_metadata(output, cfg);
    return 0;
}

int cmd_graph(JobConfig cfg) {
    const std::string output = cfg.required("output");
    const bool undirected = cfg.flag("undirected");
    Graph g = read_graph(cfg.required("edges"), cfg.required("nodes"), undirected);
    WalkFeatureConfig wc;
    wc.walk_length = static_cast<int>(cfg.integer("walk-length", 2));
    wc.trunc = static_cast<int>(cfg.integer("trunc", 2));
    wc.zero_start = cfg.flag("zero-start");
    wc.increments = cfg.flag("increments", true);
    wc.jobs = jobs_of(cfg);
    if (cfg.has("functionals")) {
        const auto w = read_ls2t_weights_file(cfg.str("functionals", ""));
        for (int j = 0; j < w.width; ++j) wc.functionals.push_back(w.functional(j));
        if (w.trunc != wc.trunc) throw ConfigError("functional file truncation differs from --trunc");
    } else {
        const auto w = init_ls2t_weights(LS2TWeights::Variant::independent,
                                         static_cast<int>(cfg.integer("width", 4)), wc.trunc, g.dim(), seed_of(cfg));
        for (int j = 0; j < w.width; ++j) wc.functionals.push_back(w.functional(j));
        cfg.values["seed"] = std::to_string(seed_of(cfg));
        cfg.values["width"] = std::to_string(w.width);
    }
    cfg.values["walk-length"] = std::to_string(wc.walk_length);
    cfg.values["trunc"] = std::to_string(wc.trunc);
    cfg.values["undirected"] = undirected ? "true" : "false";
    const auto feats = hypoelliptic_features(g, wc);
    const int M = wc.trunc, F = static_cast<int>(feats.size());
    std::vector<std::string> names;
    for (int m = 0; m <= M; ++m)
        for (int j = 0; j < F; ++j) names.push_back("m" + std::to_string(m) + "_" + std::to_string(j));
    auto row_of = [&](auto getter) {
        Eigen::RowVectorXd r((M + 1) * F);
        for (int m = 0; m <= M; ++m)
            for (int j = 0; j < F; ++j) r(m * F + j) = getter(j, m);
        return r;
    };
    {
        auto out = open_out(output);
        out << "node";
        for (const auto& n : names) out << "," << n;
        out << "\n";
        for (int i = 0; i < g.num_nodes(); ++i)
            write_row(out, g.node_ids[i], nullptr, row_of([&](int j, int m) { return feats[j](i, m); }));
    }
    if (cfg.has("pooled-output")) {
        const auto pooled = mean_pool(feats);
        auto out = open_out(cfg.str("pooled-output", ""));
        out << "graph";
        for (const auto& n : names) out << "," << n;
        out << "\n";
        write_row(out, "pooled", nullptr, row_of([&](int j, int m) { return pooled[j](m); }));
    }
    if (cfg.flag("oracle")) {
        const auto ref = walk_oracle(g, wc);
        double dev = 0.0;
        for (int j = 0; j < F; ++j) dev = std::max(dev, (ref[j] - feats[j]).cwiseAbs().maxCoeff());
        cfg.values["oracle_max_dev"] = csv::format(dev);
        std::cerr << "oracle max deviation: " << csv::format(dev) << "\n";
    }
    write_metadata(output, cfg);
    return 0;
}

int cmd_fit(JobConfig cfg) {
    const std::string output = cfg.required("output");
    const double ridge = cfg.real("ridge", 1e-3);
    if (!(ridge > 0.0)) throw ConfigError("ridge penalty must be positive");
    const auto ft = csv::read_file(cfg.required("features"));
    const auto tt = csv::read_file(cfg.required("targets"));
    if (ft.header.empty() || ft.header[0] != "id") throw InputError("feature file must start with an id column");
    if (ft.header.size() > 1 && ft.header[1] == "step") throw InputError("fit expects one feature row per id");
    if (tt.header.size() < 2 || tt.header[0] != "id" || tt.header[1] != "target")
        throw InputError("target file header must be id,target[,split]");
    const bool has_split = tt.header.size() >= 3 && tt.header[2] == "split";
    struct Target {
        double y;
        bool test;
    };
    std::map<std::string, Target> targets;
    for (std::size_t r = 0; r < tt.rows.size(); ++r) {
        const auto& row = tt.rows[r];
        bool test = false;
        if (has_split) {
            if (row[2] == "test") test = true;
            else if (row[2] != "train")
                throw InputError("targets:" + std::to_string(tt.line_numbers[r]) + ":3: split must be train or test");
        }
        if (!targets.emplace(row[0], Target{csv::to_double(row[1], "targets", tt.line_numbers[r], 2), test}).second)
            throw InputError("duplicate target id '" + row[0] + "'");
    }
    const Eigen::Index P = static_cast<Eigen::Index>(ft.header.size()) - 1;
    const Eigen::Index N = static_cast<Eigen::Index>(ft.rows.size());
    Eigen::MatrixXd X(N, P);
    Eigen::VectorXd y(N);
    std::vector<bool> is_test(N);
    std::set<std::string> seen;
    for (Eigen::Index i = 0; i < N; ++i) {
        const auto& row = ft.rows[i];
        auto it = targets.find(row[0]);
        if (it == targets.end()) throw InputError("id mismatch: no target for '" + row[0] + "'");
        if (!seen.insert(row[0]).second) throw InputError("duplicate feature id '" + row[0] + "'");
        for (Eigen::Index c = 0; c < P; ++c)
            X(i, c) = csv::to_double(row[c + 1], "features", ft.line_numbers[i], static_cast<int>(c) + 2);
        y(i) = it->second.y;
        is_test[i] = it->second.test;
    }
    if (seen.size() != targets.size()) throw InputError("id mismatch: targets without features");
    std::vector<Eigen::Index> train;
    for (Eigen::Index i = 0; i < N; ++i)
        if (!is_test[i]) train.push_back(i);
    if (train.empty()) throw InputError("no training rows");
    const Eigen::Index n = static_cast<Eigen::Index>(train.size());
    Eigen::MatrixXd Xt(n, P);
    Eigen::VectorXd yt(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        Xt.row(k) = X.row(train[k]);
        yt(k) = y(train[k]);
    }
    // Unpenalized intercept via centering.
    const Eigen::RowVectorXd mean = Xt.colwise().mean();
    const double ymean = yt.mean();
    const Eigen::MatrixXd Xc = Xt.rowwise() - mean;
    const Eigen::VectorXd yc = yt.array() - ymean;
    Eigen::VectorXd w;
    if (P <= n) {
        Eigen::MatrixXd A = Xc.transpose() * Xc;
        A.diagonal().array() += ridge;
        w = A.ldlt().solve(Xc.transpose() * yc);
    } else {
        Eigen::MatrixXd G = Xc * Xc.transpose();
        G.diagonal().array() += ridge;
        w = Xc.transpose() * G.ldlt().solve(yc);
    }
    if (!w.allFinite()) throw NumericError("ridge solve produced nonfinite weights");
    const Eigen::VectorXd pred = ((X.rowwise() - mean) * w).array() + ymean;

    bool binary = true;
    for (Eigen::Index i = 0; i < N; ++i) binary = binary && (y(i) == 1.0 || y(i) == -1.0);
    auto metrics = [&](bool test, double& rmse, double& acc, long& count) {
        double se = 0.0;
        long hit = 0;
        count = 0;
        for (Eigen::Index i = 0; i < N; ++i) {
            if (is_test[i] != test) continue;
            ++count;
            se += (pred(i) - y(i)) * (pred(i) - y(i));
            hit += ((pred(i) >= 0.0 ? 1.0 : -1.0) == y(i)) ? 1 : 0;
        }
        rmse = count ? std::sqrt(se / count) : std::nan("");
        acc = count ? double(hit) / count : std::nan("");
    };
    {
        auto out = open_out(output);
        out << "id,target,prediction,split\n";
        for (Eigen::Index i = 0; i < N; ++i)
            out << ft.rows[i][0] << "," << csv::format(y(i)) << "," << csv::format(pred(i)) << ","
                << (is_test[i] ? "test" : "train") << "\n";
    }
    const std::string metrics_path = cfg.str("metrics", output + ".metrics.csv");
    {
        auto out = open_out(metrics_path);
        out << "split,count,rmse" << (binary ? ",accuracy" : "") << "\n";
        for (bool test : {false, true}) {
            double rmse = 0.0, acc = 0.0;
            long count = 0;
            metrics(test, rmse, acc, count);
            if (count == 0) continue;
            out << (test ? "test" : "train") << "," << count << "," << csv::format(rmse);
            if (binary) out << "," << csv::format(acc);
            out << "\n";
            cfg.values[std::string(test ? "test" : "train") + "_rmse"] = csv::format(rmse);
            if (binary) cfg.values[std::string(test ? "test" : "train") + "_accuracy"] = csv::format(acc);
        }
    }
    cfg.values["ridge"] = csv::format(ridge);
    write_metadata(output, cfg);
    return 0;
}

int cmd_synth(JobConfig cfg) {
    const std::string output = cfg.required("output");
    const std::string targets_path = cfg.required("targets");
    const int N = static_cast<int>(cfg.integer("count", 200));
    const int L = static_cast<int>(cfg.integer("length", 20));
    const double noise = cfg.real("noise", 0.3);
    const double test_fraction = cfg.real("test-fraction", 0.5);
    const std::uint64_t seed = seed_of(cfg);
    if (N < 2 || L < 1) throw ConfigError("need count >= 2 and length >= 1");
    CounterRng rng(seed, 0, CounterRng::data);
    std::uint64_t draw = 0;
    auto out = open_out(output);
    auto tout = open_out(targets_path);
    out << "id,step,c0\n";
    tout << "id,target,split\n";
    for (int i = 0; i < N; ++i) {
        const double label = i % 2 == 0 ? 1.0 : -1.0;
        const double offset = 2.0 * rng.uniform(draw++) - 1.0;
        const std::string id = "s" + std::to_string(i);
        for (int t = 0; t <= L; ++t) {
            const double v = offset + label * double(t) / L + noise * rng.normal(draw++);
            out << id << "," << t << "," << csv::format(v) << "\n";
        }
        const bool test = rng.uniform(draw++) < test_fraction;
        tout << id << "," << csv::format(label) << "," << (test ? "test" : "train") << "\n";
    }
    out.close();
    write_metadata(output, cfg);
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"Signature features, kernels and random feature maps for sequences and graphs"};
    app.require_subcommand(1);
    std::map<std::string, std::string> given;
    std::string config_path;

    auto add_common = [&](CLI::App* sub, const std::vector<std::string>& keys, const std::vector<std::string>& flags) {
        sub->add_option("--config", config_path, "key=value file; command line flags win");
        for (const auto& k : keys)
            sub->add_option_function<std::string>("--" + k, [&given, k](const std::string& v) { given[k] = v; });
        for (const auto& k : flags)
            sub->add_flag_function("--" + k, [&given, k](std::int64_t) { given[k] = "true"; });
    };

    const std::vector<std::string> shared{"seed", "jobs", "trunc", "order", "static", "sigma", "alpha", "augment", "output"};
    auto* features = app.add_subcommand("features", "write feature vectors for a sequence batch");
    {
        auto keys = shared;
        for (const char* k : {"input", "mode", "rff-dim", "decay", "frac-order", "window", "weights", "width", "variant",
                              "params-out"})
            keys.push_back(k);
        add_common(features, keys, {"normalize", "stream"});
    }
    auto* gram_cmd = app.add_subcommand("gram", "write the signature kernel Gram matrix");
    {
        auto keys = shared;
        for (const char* k : {"input", "input2", "cell-cap"}) keys.push_back(k);
        add_common(gram_cmd, keys, {"normalize", "per-level"});
    }
    auto* graph_cmd = app.add_subcommand("graph", "write node features from walks on a graph");
    {
        auto keys = shared;
        for (const char* k : {"edges", "nodes", "walk-length", "functionals", "width", "pooled-output", "increments"})
            keys.push_back(k);
        add_common(graph_cmd, keys, {"undirected", "zero-start", "oracle"});
    }
    auto* fit_cmd = app.add_subcommand("fit", "closed-form ridge readout on a feature file");
    add_common(fit_cmd, {"features", "targets", "ridge", "metrics", "output", "seed", "jobs"}, {});
    auto* synth_cmd = app.add_subcommand("synth", "write the up/down trend toy dataset");
    add_common(synth_cmd, {"output", "targets", "count", "length", "noise", "test-fraction", "seed"}, {});

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        JobConfig cfg;
        cfg.values = given;
        if (!config_path.empty()) cfg.merge_file(config_path);
        std::string name;
        for (auto* s : app.get_subcommands()) name = s->get_name();
        cfg.values["command"] = name;
        if (name == "features") return cmd_features(cfg);
        if (name == "gram") return cmd_gram(cfg);
        if (name == "graph") return cmd_graph(cfg);
        if (name == "fit") return cmd_fit(cfg);
        return cmd_synth(cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::bad_alloc&) {
        std::cerr << "error: out of memory\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace sigkit::cli
