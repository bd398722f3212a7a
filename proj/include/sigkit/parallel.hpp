#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sigkit {

// Runs f(i) for i in [0, n) on up to `jobs` threads, in contiguous blocks.
// Each index is handled by exactly one call, so results written per index do not depend on jobs.
template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
    const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

// Channelwise linear recurrence h_l = a_l * h_{l-1} + b_l with h_{-1} = 0.
// Rows are time steps, columns channels. Returns all h_l.
Eigen::ArrayXXd linear_scan(const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b, int jobs = 1);

// Special case a = 1: running sum along rows.
Eigen::ArrayXXd prefix_sum(const Eigen::ArrayXXd& b, int jobs = 1);

} // namespace sigkit
