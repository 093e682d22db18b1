#ifndef TRENDOP_OPERATOR_HPP
#define TRENDOP_OPERATOR_HPP

#include "trendop/embed.hpp"

#include <Eigen/Dense>

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

namespace trendop::op {

using cplx = std::complex<double>;

/// Row-stochastic approximation of the s-step transfer operator on the
/// embedded trajectory. Right-multiplying a vector of function samples by
/// P pushes the function forward s steps.
struct MarkovOperator {
    Eigen::MatrixXd P;
    int s = 0;
    int K = 0;
    double dt = 1.0;
    Eigen::VectorXd bandwidths; ///< one per embedded point (all N of them)

    Eigen::Index size() const { return P.rows(); }
};

/// What to do when the K-th neighbour coincides with the point (distance
/// below 1e-12 times the data diameter), as happens for exactly periodic
/// orbits.
enum class DuplicatePolicy {
    error, ///< NumericalError
    merge, ///< neighbours coinciding with the query point are not counted
};

/// Distance from each point to its K-th nearest neighbour, the point itself
/// excluded. Neighbours are searched over all N points.
///
/// Throws ValidationError if K >= N. Under DuplicatePolicy::error a
/// bandwidth below 1e-12 times the data diameter is a NumericalError; under
/// merge only having fewer than K distinct neighbours is.
Eigen::VectorXd knn_bandwidths(const embed::EmbeddedSeries &points, int K,
                               DuplicatePolicy duplicates = DuplicatePolicy::error);

/// S_ij = exp(-|h_i - h_{j+s}|^2 / (d_i d_{j+s})), i, j = 0..N-s-1.
Eigen::MatrixXd kernel_matrix(const embed::EmbeddedSeries &points, int s,
                              const Eigen::VectorXd &bandwidths);

/// Normalizes the rows of S to sum to one. A row with a non-positive or
/// non-finite sum (a point isolated under the kernel) is a NumericalError.
MarkovOperator row_stochastic(Eigen::MatrixXd S);

/// knn_bandwidths + kernel_matrix + row_stochastic, with metadata filled.
MarkovOperator build_operator(const embed::EmbeddedSeries &points, int s, int K,
                              DuplicatePolicy duplicates = DuplicatePolicy::error);

const char *to_string(DuplicatePolicy p);
DuplicatePolicy duplicate_policy_from_string(const std::string &s);

/// Leading eigenpairs of P with matched dual vectors.
///
/// Ordering: descending modulus; equal moduli by descending real part;
/// conjugate partners adjacent, positive imaginary part first. Each right
/// vector has unit 2-norm and its largest-modulus entry real and positive.
/// Each dual vector is an eigenvector of P^T for conj(lambda), scaled so
/// that dual^H right = 1.
struct SpectralDecomposition {
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd right;
    Eigen::MatrixXcd dual;
    /// Index of the conjugate partner, or -1 for real eigenvalues.
    std::vector<int> partner;
    /// |P v - lambda v| / |v|
    std::vector<double> residuals;
    /// |P^T v' - conj(lambda) v'| / |v'|
    std::vector<double> dual_residuals;
    /// Eigenvalue condition number 1/|u^H v| for unit u, v. Large values
    /// mark (nearly) defective eigenvalues where biorthogonality is not
    /// guaranteed.
    std::vector<double> condition;
    /// True when the eigenvalue is clustered with another retained one or
    /// badly conditioned.
    std::vector<bool> flagged;
    int s = 0;
    double dt = 1.0;

    int size() const { return static_cast<int>(eigenvalues.size()); }
    bool is_real(int j) const { return partner[static_cast<std::size_t>(j)] < 0; }
};

/// Tolerance under which an imaginary part counts as zero.
inline constexpr double real_tolerance = 1e-10;

/// Top-m eigenpairs of op.P by modulus. If the m-th eigenvalue is the first
/// of a conjugate pair its partner is kept too, so m+1 pairs may be
/// returned. Throws NumericalError if the dense solver fails to converge
/// or a residual exceeds 1e-6.
SpectralDecomposition eigendecompose(const MarkovOperator &op, int m);

/// Eigenvalue table: index (1-based), Re, Im, modulus, arg, residual.
void write_eigenvalues(const SpectralDecomposition &dec,
                       const std::filesystem::path &path);

/// Writes P as a tab-delimited matrix.
void write_matrix(const Eigen::MatrixXd &m, const std::filesystem::path &path);

} // namespace trendop::op

#endif
