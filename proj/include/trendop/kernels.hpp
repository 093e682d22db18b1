#ifndef TRENDOP_KERNELS_HPP
#define TRENDOP_KERNELS_HPP

#include "trendop/embed.hpp"

#include <Eigen/Dense>

// Data-parallel inner loops of operator assembly. The top-level functions
// are OpenMP-parallel over rows (or columns) with no cross-iteration writes;
// the `serial` namespace keeps a plain single-threaded version of each for
// tests and benchmarks. Both compute every entry with the same expression,
// so their outputs agree bit for bit.

namespace trendop::kernels {

using embed::RowMatrix;

struct KnnDistances {
    Eigen::VectorXd distance; ///< K-th nearest neighbour distance, self excluded
    double diameter = 0.0;    ///< largest pairwise distance
};

/// Neighbours within squared distance `coincide_sq` of a point are not
/// counted. The distance is NaN when fewer than K neighbours remain.
KnnDistances knn_distances(const RowMatrix &points, int K, double coincide_sq = -1.0);

/// Largest pairwise distance.
double diameter(const RowMatrix &points);

/// (N-s) x (N-s) matrix exp(-|p_i - p_{j+s}|^2 / (d_i d_{j+s})).
Eigen::MatrixXd variable_bandwidth_kernel(const RowMatrix &points, int s,
                                          const Eigen::VectorXd &bandwidths);

/// Divides every row by its sum in place; returns the row sums.
Eigen::VectorXd normalize_rows(Eigen::MatrixXd &m);

namespace serial {
KnnDistances knn_distances(const RowMatrix &points, int K, double coincide_sq = -1.0);
double diameter(const RowMatrix &points);
Eigen::MatrixXd variable_bandwidth_kernel(const RowMatrix &points, int s,
                                          const Eigen::VectorXd &bandwidths);
Eigen::VectorXd normalize_rows(Eigen::MatrixXd &m);
} // namespace serial

/// Threads OpenMP will use for the parallel kernels.
int max_threads();

} // namespace trendop::kernels

#endif
