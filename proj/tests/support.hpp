#ifndef TRENDOP_TESTS_SUPPORT_HPP
#define TRENDOP_TESTS_SUPPORT_HPP

#include "trendop/embed.hpp"
#include "trendop/timeseries.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace testing {

inline constexpr double pi = std::numbers::pi;

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string &name) {
    auto dir = std::filesystem::temp_directory_path() / ("trendop_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Wraps raw points (one per row) as an embedding with Q = 1.
inline trendop::embed::EmbeddedSeries as_points(const Eigen::MatrixXd &pts) {
    trendop::embed::EmbeddedSeries e;
    e.points = pts;
    e.source_length = pts.rows();
    e.source_dim = pts.cols();
    return e;
}

inline Eigen::MatrixXd random_points(Eigen::Index n, Eigen::Index dim, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd p(n, dim);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index c = 0; c < dim; ++c)
            p(i, c) = u(rng);
    return p;
}

/// Exhaustive K-th neighbour distance, self excluded, by sorting all
/// distances of each point.
inline std::vector<double> brute_force_knn(const Eigen::MatrixXd &pts, int K) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        std::vector<double> d;
        for (Eigen::Index j = 0; j < pts.rows(); ++j)
            if (j != i)
                d.push_back((pts.row(i) - pts.row(j)).norm());
        std::sort(d.begin(), d.end());
        out.push_back(d[static_cast<std::size_t>(K - 1)]);
    }
    return out;
}

inline trendop::TimeSeries cosine_series(int n, double alpha) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        v[static_cast<std::size_t>(j)] = std::cos(j * alpha);
    return trendop::TimeSeries::scalar(v);
}

} // namespace testing

#endif
