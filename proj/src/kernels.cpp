#include "trendop/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace trendop::kernels {

namespace {

inline double sq_dist(const double *a, const double *b, Eigen::Index dim) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double diff = a[k] - b[k];
        acc += diff * diff;
    }
    return acc;
}

inline double kernel_entry(const RowMatrix &p, Eigen::Index i, Eigen::Index col,
                           const Eigen::VectorXd &bw) {
    const double d2 = sq_dist(p.row(i).data(), p.row(col).data(), p.cols());
    return std::exp(-d2 / (bw[i] * bw[col]));
}

} // namespace

int max_threads() { return omp_get_max_threads(); }

KnnDistances knn_distances(const RowMatrix &points, int K, double coincide_sq) {
    const Eigen::Index n = points.rows();
    const Eigen::Index dim = points.cols();
    KnnDistances out;
    out.distance.resize(n);
    double max_d2 = 0.0;

#pragma omp parallel reduction(max : max_d2)
    {
        std::vector<double> scratch(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
#pragma omp for schedule(static)
        for (Eigen::Index i = 0; i < n; ++i) {
            std::size_t m = 0;
            const double *pi = points.row(i).data();
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i)
                    continue;
                const double d2 = sq_dist(pi, points.row(j).data(), dim);
                max_d2 = std::max(max_d2, d2);
                if (d2 > coincide_sq)
                    scratch[m++] = d2;
            }
            if (m < static_cast<std::size_t>(K)) {
                out.distance[i] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            auto kth = scratch.begin() + (K - 1);
            std::nth_element(scratch.begin(), kth, scratch.begin() + static_cast<std::ptrdiff_t>(m));
            out.distance[i] = std::sqrt(*kth);
        }
    }
    out.diameter = std::sqrt(max_d2);
    return out;
}

double diameter(const RowMatrix &points) {
    const Eigen::Index n = points.rows();
    double max_d2 = 0.0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : max_d2)
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            max_d2 = std::max(max_d2, sq_dist(points.row(i).data(), points.row(j).data(),
                                              points.cols()));
    return std::sqrt(max_d2);
}

Eigen::MatrixXd variable_bandwidth_kernel(const RowMatrix &points, int s,
                                          const Eigen::VectorXd &bandwidths) {
    const Eigen::Index m = points.rows() - s;
    Eigen::MatrixXd S(m, m);
    // Column-major storage: one column per iteration keeps writes contiguous.
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
            S(i, j) = kernel_entry(points, i, j + s, bandwidths);
    return S;
}

Eigen::VectorXd normalize_rows(Eigen::MatrixXd &m) {
    const Eigen::Index rows = m.rows();
    const Eigen::Index cols = m.cols();
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(rows);
    // Sum each row left to right, matching the serial loop order.
    for (Eigen::Index j = 0; j < cols; ++j)
        sums += m.col(j);
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) /= sums[i];
    return sums;
}

namespace serial {

KnnDistances knn_distances(const RowMatrix &points, int K, double coincide_sq) {
    const Eigen::Index n = points.rows();
    KnnDistances out;
    out.distance.resize(n);
    double max_d2 = 0.0;
    std::vector<double> row;
    for (Eigen::Index i = 0; i < n; ++i) {
        row.clear();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i)
                continue;
            const double d2 = sq_dist(points.row(i).data(), points.row(j).data(),
                                      points.cols());
            max_d2 = std::max(max_d2, d2);
            if (d2 > coincide_sq)
                row.push_back(d2);
        }
        std::sort(row.begin(), row.end());
        out.distance[i] = row.size() < static_cast<std::size_t>(K)
                              ? std::numeric_limits<double>::quiet_NaN()
                              : std::sqrt(row[static_cast<std::size_t>(K - 1)]);
    }
    out.diameter = std::sqrt(max_d2);
    return out;
}

double diameter(const RowMatrix &points) {
    double max_d2 = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        for (Eigen::Index j = i + 1; j < points.rows(); ++j)
            max_d2 = std::max(max_d2, sq_dist(points.row(i).data(), points.row(j).data(),
                                              points.cols()));
    return std::sqrt(max_d2);
}

Eigen::MatrixXd variable_bandwidth_kernel(const RowMatrix &points, int s,
                                          const Eigen::VectorXd &bandwidths) {
    const Eigen::Index m = points.rows() - s;
    Eigen::MatrixXd S(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            S(i, j) = kernel_entry(points, i, j + s, bandwidths);
    return S;
}

Eigen::VectorXd normalize_rows(Eigen::MatrixXd &m) {
    Eigen::VectorXd sums(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            acc += m(i, j);
        sums[i] = acc;
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) /= acc;
    }
    return sums;
}

} // namespace serial

} // namespace trendop::kernels
