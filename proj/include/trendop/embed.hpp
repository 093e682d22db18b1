#ifndef TRENDOP_EMBED_HPP
#define TRENDOP_EMBED_HPP

#include "trendop/timeseries.hpp"

#include <Eigen/Dense>

#include <filesystem>

namespace trendop::embed {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Delay vectors of a (possibly vector-valued) series.
///
/// Row r holds (h_t, h_{t-lag}, ..., h_{t-(Q-1)lag}) for source index
/// t = offset() + r, i.e. rows are stamped with their newest sample.
struct EmbeddedSeries {
    RowMatrix points;
    int Q = 1;
    int lag = 1;
    double dt = 1.0;
    double t0 = 0.0; ///< time of source sample 0
    Eigen::Index source_length = 0;
    Eigen::Index source_dim = 1;

    Eigen::Index size() const { return points.rows(); }
    Eigen::Index offset() const { return static_cast<Eigen::Index>(Q - 1) * lag; }
    /// Physical time of row r (its newest sample).
    double time(Eigen::Index r) const {
        return t0 + static_cast<double>(offset() + r) * dt;
    }
};

/// Throws ValidationError when the series is shorter than (Q-1)*lag + 1.
EmbeddedSeries delay_embed(const TimeSeries &series, int Q, int lag);

/// Writes the delay matrix with Q, lag and dt in the header.
void write_embedding(const EmbeddedSeries &e, const std::filesystem::path &path);

// Geometry of a delay-embedded harmonic. Three delays of cos(theta) with
// lag beta trace the curve (cos t, cos(t+b), cos(t+2b)), which is the image
// of the unit circle under a linear map and hence a planar ellipse.

/// (cos theta, cos(theta+beta), cos(theta+2 beta)).
Eigen::Vector3d ellipse_curve(double beta, double theta);

/// Semi-axes of the embedded ellipse. As beta varies the ellipse plane
/// pivots about the fixed (1, 0, -1) axis; the other axis tilts with beta.
struct EllipseAxes {
    double tilted_length; ///< sqrt(2 + cos 2b)
    double fixed_length;  ///< sqrt(1 - cos 2b)
    Eigen::Vector3d tilted_direction; ///< along (sin 2b, 2 sin b, sin 2b)
    Eigen::Vector3d fixed_direction;  ///< along (1, 0, -1)
};

/// For 0 < beta <= pi/2. The two lengths coincide (a circle) at beta = pi/3.
EllipseAxes ellipse_axes(double beta);

/// pi * sqrt(2 + cos 2b) * sqrt(1 - cos 2b) for 0 <= beta <= pi/2.
double ellipse_area(double beta);

/// Unit normal of the plane containing the ellipse (beta > 0).
Eigen::Vector3d ellipse_plane_normal(double beta);

/// Lag that places the fastest rotation at a quarter turn per lag:
/// round((pi/2)/alpha_max), ties down, at least 1.
int suggest_lag(double alpha_max);

} // namespace trendop::embed

#endif
