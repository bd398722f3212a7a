#include "sigkit/seqdata.hpp"

#include "sigkit/csv.hpp"
#include "sigkit/errors.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace sigkit {

Sequence::Sequence(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() < 1) throw InputError("sequence needs at least one state");
    if (values_.cols() < 1) throw InputError("sequence states need dimension >= 1");
}

Sequence::Sequence(std::initializer_list<std::initializer_list<double>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n < 1) throw InputError("sequence needs at least one state");
    const auto d = static_cast<Eigen::Index>(rows.begin()->size());
    values_.resize(n, d);
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        if (static_cast<Eigen::Index>(r.size()) != d) throw ShapeError("ragged sequence rows");
        Eigen::Index j = 0;
        for (double v : r) values_(i, j++) = v;
        ++i;
    }
    if (d < 1) throw InputError("sequence states need dimension >= 1");
}

int SequenceBatch::dim() const {
    if (sequences.empty()) throw InputError("empty batch");
    return sequences.front().dim();
}

SequenceBatch make_batch(std::vector<Sequence> seqs) {
    SequenceBatch b;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        b.ids.push_back(std::to_string(i));
        b.original_lengths.push_back(seqs[i].length());
    }
    b.sequences = std::move(seqs);
    return b;
}

std::vector<Augmentation> parse_augmentations(const std::string& spec) {
    std::vector<Augmentation> out;
    std::istringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        if (item.empty()) continue;
        if (item == "basepoint") {
            out.push_back({Augmentation::Kind::basepoint});
        } else if (item == "leadlag" || item == "lead_lag") {
            out.push_back({Augmentation::Kind::lead_lag});
        } else if (item == "time" || item.rfind("time:", 0) == 0) {
            Augmentation a{Augmentation::Kind::time};
            if (item.size() > 5) {
                try {
                    std::size_t used = 0;
                    a.tau = std::stod(item.substr(5), &used);
                    if (used != item.size() - 5) throw std::invalid_argument(item);
                } catch (const std::exception&) {
                    throw ConfigError("bad time scale in augmentation '" + item + "'");
                }
            }
            if (!(a.tau >= 0.0)) throw ConfigError("time scale must be >= 0");
            out.push_back(a);
        } else {
            throw ConfigError("unknown augmentation '" + item + "'");
        }
    }
    return out;
}

std::string format_augmentations(const std::vector<Augmentation>& augs) {
    std::string s;
    for (const auto& a : augs) {
        if (!s.empty()) s += ",";
        switch (a.kind) {
        case Augmentation::Kind::time: s += "time:" + csv::format(a.tau); break;
        case Augmentation::Kind::basepoint: s += "basepoint"; break;
        case Augmentation::Kind::lead_lag: s += "leadlag"; break;
        }
    }
    return s;
}

Sequence augment(const Sequence& seq, const Augmentation& aug) {
    const auto& x = seq.values();
    const Eigen::Index n = x.rows(), d = x.cols();
    const int L = seq.length();
    switch (aug.kind) {
    case Augmentation::Kind::time: {
        Eigen::MatrixXd out(n, d + 1);
        for (Eigen::Index i = 0; i < n; ++i) out(i, 0) = L == 0 ? 0.0 : aug.tau * double(i) / double(L);
        out.rightCols(d) = x;
        return Sequence(std::move(out));
    }
    case Augmentation::Kind::basepoint: {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n + 1, d);
        out.bottomRows(n) = x;
        return Sequence(std::move(out));
    }
    case Augmentation::Kind::lead_lag: {
        Eigen::MatrixXd out(2 * L + 1, 2 * d);
        for (int i = 0; i <= L; ++i) {
            out.row(2 * i) << x.row(i), x.row(i);
            if (i < L) out.row(2 * i + 1) << x.row(i + 1), x.row(i);
        }
        return Sequence(std::move(out));
    }
    }
    throw ConfigError("unknown augmentation");
}

Sequence augment(const Sequence& seq, const std::vector<Augmentation>& augs) {
    Sequence s = seq;
    for (const auto& a : augs) s = augment(s, a);
    return s;
}

SequenceBatch augment(const SequenceBatch& batch, const std::vector<Augmentation>& augs) {
    SequenceBatch out = batch;
    for (auto& s : out.sequences) s = augment(s, augs);
    return out;
}

SequenceBatch tabulate(const SequenceBatch& batch) {
    if (batch.sequences.empty()) throw InputError("cannot tabulate an empty batch");
    const int d = batch.sequences.front().dim();
    int Lmax = 0;
    for (const auto& s : batch.sequences) {
        if (s.dim() != d) throw ShapeError("batch has mixed channel counts");
        Lmax = std::max(Lmax, s.length());
    }
    SequenceBatch out = batch;
    if (out.original_lengths.size() != out.sequences.size()) {
        out.original_lengths.clear();
        for (const auto& s : batch.sequences) out.original_lengths.push_back(s.length());
    }
    for (auto& s : out.sequences) {
        if (s.length() == Lmax) continue;
        Eigen::MatrixXd v(Lmax + 1, d);
        v.topRows(s.length() + 1) = s.values();
        for (int i = s.length() + 1; i <= Lmax; ++i) v.row(i) = s.values().row(s.length());
        s = Sequence(std::move(v));
    }
    return out;
}

Eigen::MatrixXd increments(const Sequence& seq) {
    const auto& x = seq.values();
    const Eigen::Index L = x.rows() - 1;
    if (L <= 0) return Eigen::MatrixXd(0, x.cols());
    return x.bottomRows(L) - x.topRows(L);
}

double one_variation(const Sequence& seq) {
    return increments(seq).rowwise().norm().sum();
}

SequenceBatch read_batch_csv(std::istream& in) {
    const std::string src = "sequence csv";
    auto t = csv::read(in, src);
    if (t.header.size() < 3 || t.header[0] != "id" || t.header[1] != "step")
        throw InputError(src + ": header must be id,step,c0,...");
    const int d = static_cast<int>(t.header.size()) - 2;
    SequenceBatch b;
    std::vector<std::vector<std::vector<double>>> rows;
    std::map<std::string, std::size_t> index;
    std::vector<long> last_step;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const int line = t.line_numbers[r];
        auto [it, fresh] = index.emplace(row[0], b.ids.size());
        if (fresh) {
            b.ids.push_back(row[0]);
            rows.emplace_back();
            last_step.push_back(-1);
        } else if (it->second != b.ids.size() - 1) {
            throw InputError(src + ":" + std::to_string(line) + ":1: rows for id '" + row[0] +
                             "' are not contiguous");
        }
        const std::size_t k = it->second;
        const long step = csv::to_long(row[1], src, line, 2);
        if (step != last_step[k] + 1)
            throw InputError(src + ":" + std::to_string(line) + ":2: expected step " +
                             std::to_string(last_step[k] + 1) + " for id '" + row[0] + "'");
        last_step[k] = step;
        std::vector<double> v(d);
        for (int c = 0; c < d; ++c) v[c] = csv::to_double(row[c + 2], src, line, c + 3);
        rows[k].push_back(std::move(v));
    }
    if (b.ids.empty()) throw InputError(src + ": no sequences");
    for (const auto& r : rows) {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(r.size()), d);
        for (std::size_t i = 0; i < r.size(); ++i)
            for (int c = 0; c < d; ++c) m(static_cast<Eigen::Index>(i), c) = r[i][c];
        b.sequences.emplace_back(std::move(m));
        b.original_lengths.push_back(static_cast<int>(r.size()) - 1);
    }
    return b;
}

SequenceBatch read_batch_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return read_batch_csv(in);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_batch_csv(std::ostream& out, const SequenceBatch& batch) {
    const int d = batch.dim();
    out << "id,step";
    for (int c = 0; c < d; ++c) out << ",c" << c;
    out << "\n";
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& x = batch.sequences[i].values();
        const std::string id = i < batch.ids.size() ? batch.ids[i] : std::to_string(i);
        for (Eigen::Index s = 0; s < x.rows(); ++s) {
            out << id << "," << s;
            for (int c = 0; c < d; ++c) out << "," << csv::format(x(s, c));
            out << "\n";
        }
    }
}

} // namespace sigkit
