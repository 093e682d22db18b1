#ifndef TRENDOP_DATA_HPP
#define TRENDOP_DATA_HPP

#include "trendop/timeseries.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace trendop::data {

/// Scalar record with strictly increasing sample times.
struct NonuniformRecord {
    std::vector<double> times;
    std::vector<double> values;
    /// The file was not in ascending time order (after any age flip) and
    /// had to be sorted.
    bool reordered = false;

    std::size_t size() const { return times.size(); }
};

/// Which columns of a delimited file hold time and value. Other columns
/// (e.g. the LR04 standard error) are ignored. Lines starting with '#' are
/// always skipped; `header_lines` skips that many further lines first.
struct ColumnSpec {
    int time_column = 0;
    int value_column = 1;
    int header_lines = 0;
    /// File times are ages before present; negate them so the internal axis
    /// runs forward in time.
    bool time_is_age = false;
    /// Keep only rows whose file time lies in [min_time, max_time].
    std::optional<double> min_time;
    std::optional<double> max_time;
};

/// Column layout of the bundled LR04 stack: age (kyr), d18O, std. error.
ColumnSpec lr04_columns(double max_age_kyr = 3000.0);

/// Throws ValidationError with the line number on malformed rows, and on
/// repeated times.
NonuniformRecord load_scalar_record(const std::filesystem::path &path,
                                    const ColumnSpec &spec = {});

/// Linear interpolation at t_start, t_start + dt, ... up to t_end. Samples
/// that coincide with record times reproduce the record values exactly.
TimeSeries interpolate_uniform(const NonuniformRecord &record, double dt,
                               double t_start, double t_end);

/// Kept gridpoints of a field stack, as flat row-major grid indices.
struct GridMask {
    int rows = 0;
    int cols = 0;
    std::vector<Eigen::Index> kept;

    Eigen::Index grid_size() const { return static_cast<Eigen::Index>(rows) * cols; }
};

struct FieldStack {
    TimeSeries series; ///< one column per kept gridpoint
    GridMask mask;
    double sentinel = 0.0;
};

/// Text snapshot-stack format:
///
///     # comments
///     fieldstack <rows> <cols> <snapshots> <sentinel> <dt> <t0>
///     <rows*cols values of snapshot 0, row-major, on one line>
///     ...
///
/// The sentinel may be `nan`. Gridpoints missing at any time are dropped.
/// `sentinel` overrides the header value when given; `expected_rows/cols`
/// reject a file on another grid.
FieldStack load_field_stack(const std::filesystem::path &path,
                            std::optional<double> sentinel = std::nullopt,
                            std::optional<std::pair<int, int>> expected_grid = std::nullopt);

/// Writes snapshots (one row per time, rows*cols columns) in the format above.
void write_field_stack(const std::filesystem::path &path, int rows, int cols,
                       const Eigen::MatrixXd &snapshots, double sentinel,
                       double dt = 1.0, double t0 = 0.0);

/// Full grid from kept values; dropped cells get `fill`.
Eigen::VectorXd scatter_back(const GridMask &mask, const Eigen::VectorXd &kept,
                             double fill = std::numeric_limits<double>::quiet_NaN());

/// Subtracts from every sample the mean of its phase (index mod `cycle`)
/// over rows [window_start, window_end).
TimeSeries anomalies(const TimeSeries &series, Eigen::Index window_start,
                     Eigen::Index window_end, int cycle);

/// Rows [offset, offset + length) as a new series with the matching t0.
TimeSeries slice(const TimeSeries &series, Eigen::Index offset, Eigen::Index length);

/// Delimited text with dt/t0/unit metadata and a time column.
void write_timeseries(const TimeSeries &series, const std::filesystem::path &path);
TimeSeries read_timeseries(const std::filesystem::path &path);

} // namespace trendop::data

#endif
