#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace sigkit {

inline constexpr double max_tensor_entries = 1e7;

// Levels 0..M of dense tensors over R^d. Level m holds d^m entries, row-major multi-index.
class TruncatedTensorSeries {
public:
    TruncatedTensorSeries() = default;
    // Zero series. Throws CapacityError when d^M exceeds max_tensor_entries.
    TruncatedTensorSeries(int d, int M);

    static TruncatedTensorSeries unit(int d, int M);

    int dim() const { return d_; }
    int trunc() const { return M_; }

    std::vector<double>& level(int m) { return levels_[m]; }
    const std::vector<double>& level(int m) const { return levels_[m]; }
    double scalar() const { return levels_[0][0]; }

    double level_norm(int m) const;
    // Level-major concatenation of all levels.
    std::vector<double> flatten() const;
    std::size_t size() const;

private:
    int d_ = 0;
    int M_ = 0;
    std::vector<std::vector<double>> levels_;
};

struct Rank1Element {
    int M = 0;
    double scalar = 1.0;
    // components[m-1][k] is the k-th vector of level m.
    std::vector<std::vector<Eigen::VectorXd>> components;

    int dim() const;
    static Rank1Element zeros(int d, int M, double scalar = 0.0);
};

void check_capacity(int d, int M);
std::size_t ipow(std::size_t base, int e);

TruncatedTensorSeries algebra_mul(const TruncatedTensorSeries& a, const TruncatedTensorSeries& b);
TruncatedTensorSeries tensor_exp(const Eigen::VectorXd& v, int M);
TruncatedTensorSeries inverse(const TruncatedTensorSeries& a);
double inner(const TruncatedTensorSeries& a, const TruncatedTensorSeries& b);
TruncatedTensorSeries densify(const Rank1Element& r);

// out = a (x) b for flat row-major tensors.
std::vector<double> outer(const std::vector<double>& a, const std::vector<double>& b);

} // namespace sigkit
