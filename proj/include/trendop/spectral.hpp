#ifndef TRENDOP_SPECTRAL_HPP
#define TRENDOP_SPECTRAL_HPP

#include "trendop/operator.hpp"
#include "trendop/timeseries.hpp"

#include <filesystem>
#include <limits>
#include <optional>
#include <set>
#include <vector>

namespace trendop::spectral {

using op::cplx;
using op::SpectralDecomposition;

/// 2 pi s dt / |arg lambda|. Throws ValidationError for (numerically) real
/// eigenvalues, whose period is infinite.
double eigenperiod(cplx lambda, int s, double dt);

/// eigenperiod, or +infinity for real eigenvalues (the table convention).
double period_or_infinity(cplx lambda, int s, double dt);

enum class ModeKind { constant, trend, oscillatory };
const char *to_string(ModeKind kind);

struct ModeReport {
    int index = 0; ///< 0-based position in the decomposition
    cplx eigenvalue;
    ModeKind kind = ModeKind::trend;
    double period = std::numeric_limits<double>::infinity();
    double amplitude = 0.0; ///< |Y_j|, Y_j = v'_j^H h (2-norm over components)
    Eigen::VectorXd time_series; ///< Re v_j
};

/// Projection coefficients and mode kinds. Conjugate pairs are reported
/// once, through their positive-frequency member. `observations` must be
/// aligned with the eigenvectors (same length).
std::vector<ModeReport> classify_modes(const SpectralDecomposition &dec,
                                       const TimeSeries &observations);

/// First real eigenvector after the constant one, if any.
std::optional<int> trend_mode(const SpectralDecomposition &dec);

/// Adds the conjugate partner of every complex index. Returns the indices
/// that had to be added.
std::vector<int> close_under_conjugation(const SpectralDecomposition &dec,
                                         std::set<int> &indices);

struct Projection {
    std::vector<int> indices;
    Eigen::MatrixXcd values; ///< same shape as the target
    /// Set when the index set is closed under conjugation and the target is
    /// real, in which case `values` is real up to rounding.
    bool real = false;
    double max_imag = 0.0;

    Eigen::MatrixXd real_part() const { return values.real(); }
};

/// out_m = sum_j v_{j,m} (sum_n conj(v'_{j,n}) Y_n), componentwise.
Projection project(const SpectralDecomposition &dec, const std::set<int> &indices,
                   const Eigen::MatrixXd &target);

struct AffineFit {
    double offset = 0.0;
    double gain = 1.0;
    Eigen::VectorXd scaled;
};

/// Least-squares gain and offset taking `mode` onto `reference`.
AffineFit affine_scale(const Eigen::VectorXd &mode, const Eigen::VectorXd &reference);

/// RMS |mode| inside the mask over RMS |mode| outside it; +infinity when
/// the mode vanishes outside.
double regime_localization(const Eigen::VectorXcd &mode, const std::vector<bool> &mask);

/// Pearson correlation coefficient.
double pearson(const Eigen::VectorXd &a, const Eigen::VectorXd &b);

/// Mode table: j (1-based), Re, Im, period, amplitude, kind.
void write_mode_table(const std::vector<ModeReport> &modes,
                      const std::filesystem::path &path);

} // namespace trendop::spectral

#endif
