#include "trendop/embed.hpp"

#include "trendop/error.hpp"
#include "trendop/io.hpp"

#include <cmath>
#include <numbers>

namespace trendop::embed {

EmbeddedSeries delay_embed(const TimeSeries &series, int Q, int lag) {
    if (Q < 1 || lag < 1)
        throw ValidationError("delay_embed: Q and lag must be at least 1");
    const Eigen::Index len = series.length();
    const Eigen::Index d = series.dim();
    const Eigen::Index span = static_cast<Eigen::Index>(Q - 1) * lag;
    if (len <= span)
        throw ValidationError("delay_embed: series of length " +
                              std::to_string(len) + " is too short for Q=" +
                              std::to_string(Q) + ", lag=" + std::to_string(lag) +
                              "; need at least " + std::to_string(span + 1) +
                              " samples");
    EmbeddedSeries e;
    e.Q = Q;
    e.lag = lag;
    e.dt = series.dt;
    e.t0 = series.t0;
    e.source_length = len;
    e.source_dim = d;
    const Eigen::Index n = len - span;
    e.points.resize(n, d * Q);
    for (Eigen::Index r = 0; r < n; ++r) {
        const Eigen::Index t = span + r;
        for (int q = 0; q < Q; ++q)
            e.points.row(r).segment(q * d, d) = series.samples.row(t - q * lag);
    }
    return e;
}

void write_embedding(const EmbeddedSeries &e, const std::filesystem::path &path) {
    io::TableWriter w(path);
    w.meta("Q", std::to_string(e.Q));
    w.meta("lag", std::to_string(e.lag));
    w.meta("dt", e.dt);
    std::vector<std::string> cols{"time"};
    for (int q = 0; q < e.Q; ++q)
        for (Eigen::Index c = 0; c < e.source_dim; ++c)
            cols.push_back("h" + std::to_string(c) + "_lag" + std::to_string(q));
    w.header(cols);
    std::vector<double> row(static_cast<std::size_t>(e.points.cols()) + 1);
    for (Eigen::Index r = 0; r < e.size(); ++r) {
        row[0] = e.time(r);
        for (Eigen::Index c = 0; c < e.points.cols(); ++c)
            row[static_cast<std::size_t>(c) + 1] = e.points(r, c);
        w.row(row);
    }
}

Eigen::Vector3d ellipse_curve(double beta, double theta) {
    return {std::cos(theta), std::cos(theta + beta), std::cos(theta + 2.0 * beta)};
}

EllipseAxes ellipse_axes(double beta) {
    if (!(beta > 0.0 && beta <= std::numbers::pi / 2))
        throw ValidationError("ellipse_axes: beta must lie in (0, pi/2]; the "
                              "ellipse degenerates to a segment at beta = 0");
    const double c2 = std::cos(2.0 * beta);
    EllipseAxes ax;
    ax.tilted_length = std::sqrt(2.0 + c2);
    ax.fixed_length = std::sqrt(1.0 - c2);
    const double s2 = std::sin(2.0 * beta);
    ax.tilted_direction = Eigen::Vector3d(s2, 2.0 * std::sin(beta), s2).normalized();
    ax.fixed_direction = Eigen::Vector3d(1.0, 0.0, -1.0).normalized();
    return ax;
}

double ellipse_area(double beta) {
    if (!(beta >= 0.0 && beta <= std::numbers::pi / 2))
        throw ValidationError("ellipse_area: beta must lie in [0, pi/2]");
    const double c2 = std::cos(2.0 * beta);
    return std::numbers::pi * std::sqrt(2.0 + c2) * std::sqrt(std::max(0.0, 1.0 - c2));
}

Eigen::Vector3d ellipse_plane_normal(double beta) {
    const Eigen::Vector3d u(1.0, std::cos(beta), std::cos(2.0 * beta));
    const Eigen::Vector3d v(0.0, -std::sin(beta), -std::sin(2.0 * beta));
    return u.cross(v).normalized();
}

int suggest_lag(double alpha_max) {
    if (!(alpha_max > 0.0 && alpha_max <= std::numbers::pi))
        throw ValidationError("suggest_lag: alpha_max must lie in (0, pi]");
    const double ratio = (std::numbers::pi / 2) / alpha_max;
    // Nearest integer, exact halves go down.
    double lag = std::ceil(ratio - 0.5);
    return std::max(1, static_cast<int>(lag));
}

} // namespace trendop::embed
