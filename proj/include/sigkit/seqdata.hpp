#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace sigkit {

// L+1 states of dimension d, one state per row.
class Sequence {
public:
    Sequence() = default;
    explicit Sequence(Eigen::MatrixXd values);
    Sequence(std::initializer_list<std::initializer_list<double>> rows);

    int length() const { return static_cast<int>(values_.rows()) - 1; }
    int dim() const { return static_cast<int>(values_.cols()); }
    const Eigen::MatrixXd& values() const { return values_; }
    Eigen::VectorXd state(int i) const { return values_.row(i).transpose(); }

private:
    Eigen::MatrixXd values_;
};

struct SequenceBatch {
    std::vector<std::string> ids;
    std::vector<Sequence> sequences;
    std::vector<int> original_lengths;

    std::size_t size() const { return sequences.size(); }
    int dim() const;
};

SequenceBatch make_batch(std::vector<Sequence> seqs);

struct Augmentation {
    enum class Kind { time, basepoint, lead_lag };
    Kind kind;
    double tau = 1.0;
};

// Parses "time:0.5,basepoint,leadlag". Empty string gives no augmentations.
std::vector<Augmentation> parse_augmentations(const std::string& spec);
std::string format_augmentations(const std::vector<Augmentation>& augs);

Sequence augment(const Sequence& seq, const Augmentation& aug);
Sequence augment(const Sequence& seq, const std::vector<Augmentation>& augs);
SequenceBatch augment(const SequenceBatch& batch, const std::vector<Augmentation>& augs);

SequenceBatch tabulate(const SequenceBatch& batch);

// Row i is values[i+1] - values[i]; zero rows when L = 0.
Eigen::MatrixXd increments(const Sequence& seq);

double one_variation(const Sequence& seq);

// Long format: id,step,c0,...; rows grouped by id and ordered by step.
SequenceBatch read_batch_csv(std::istream& in);
SequenceBatch read_batch_csv_file(const std::string& path);
void write_batch_csv(std::ostream& out, const SequenceBatch& batch);

} // namespace sigkit
