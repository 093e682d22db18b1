#ifndef TRENDOP_TIMESERIES_HPP
#define TRENDOP_TIMESERIES_HPP

#include <Eigen/Dense>

#include <span>
#include <string>

namespace trendop {

/// Uniformly sampled series. Row t of `samples` is the snapshot at
/// t0 + t*dt; scalar series have one column.
struct TimeSeries {
    Eigen::MatrixXd samples;
    double dt = 1.0;
    double t0 = 0.0;
    std::string time_unit = "step";
    std::string value_unit;

    Eigen::Index length() const { return samples.rows(); }
    Eigen::Index dim() const { return samples.cols(); }
    double time(Eigen::Index i) const { return t0 + static_cast<double>(i) * dt; }

    static TimeSeries scalar(std::span<const double> values, double dt = 1.0,
                             double t0 = 0.0);
};

} // namespace trendop

#endif
