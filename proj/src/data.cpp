#include "trendop/data.hpp"

#include "trendop/error.hpp"
#include "trendop/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace trendop {

TimeSeries TimeSeries::scalar(std::span<const double> values, double dt, double t0) {
    TimeSeries ts;
    ts.samples = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                   static_cast<Eigen::Index>(values.size()));
    ts.dt = dt;
    ts.t0 = t0;
    return ts;
}

namespace data {

namespace {

std::string where(const std::filesystem::path &path, std::size_t lineno) {
    return path.string() + ":" + std::to_string(lineno);
}

} // namespace

ColumnSpec lr04_columns(double max_age_kyr) {
    ColumnSpec spec;
    spec.time_column = 0;
    spec.value_column = 1;
    spec.time_is_age = true;
    spec.min_time = 0.0;
    spec.max_time = max_age_kyr;
    return spec;
}

NonuniformRecord load_scalar_record(const std::filesystem::path &path,
                                    const ColumnSpec &spec) {
    if (spec.time_column < 0 || spec.value_column < 0)
        throw ValidationError("load_scalar_record: column indices must be non-negative");
    std::ifstream in(path);
    if (!in)
        throw ValidationError("load_scalar_record: cannot open '" + path.string() + "'");

    std::vector<std::pair<double, double>> rows;
    std::string line;
    std::size_t lineno = 0;
    int to_skip = spec.header_lines;
    const auto need = static_cast<std::size_t>(std::max(spec.time_column, spec.value_column)) + 1;
    while (std::getline(in, line)) {
        ++lineno;
        auto fields = io::split_fields(line);
        if (fields.empty() || fields.front().front() == '#')
            continue;
        if (to_skip > 0) {
            --to_skip;
            continue;
        }
        if (fields.size() < need)
            throw ValidationError(where(path, lineno) + ": expected at least " +
                                  std::to_string(need) + " columns, found " +
                                  std::to_string(fields.size()));
        double t, v;
        if (!io::parse_double(fields[static_cast<std::size_t>(spec.time_column)], t) ||
            !io::parse_double(fields[static_cast<std::size_t>(spec.value_column)], v))
            throw ValidationError(where(path, lineno) + ": cannot parse '" + line + "'");
        if (!std::isfinite(t) || !std::isfinite(v))
            throw ValidationError(where(path, lineno) + ": non-finite value");
        if ((spec.min_time && t < *spec.min_time) || (spec.max_time && t > *spec.max_time))
            continue;
        rows.emplace_back(spec.time_is_age ? -t : t, v);
    }
    if (rows.empty())
        throw ValidationError("load_scalar_record: no samples in '" + path.string() + "'");

    NonuniformRecord rec;
    auto by_time = [](const auto &a, const auto &b) { return a.first < b.first; };
    if (spec.time_is_age) {
        // Ages descend once negated; reversing is the expected order, not a
        // reordering worth reporting.
        std::reverse(rows.begin(), rows.end());
    }
    if (!std::is_sorted(rows.begin(), rows.end(), by_time)) {
        std::stable_sort(rows.begin(), rows.end(), by_time);
        rec.reordered = true;
    }
    for (std::size_t k = 1; k < rows.size(); ++k)
        if (rows[k].first == rows[k - 1].first)
            throw ValidationError("load_scalar_record: time " +
                                  io::format_double(spec.time_is_age ? -rows[k].first
                                                                     : rows[k].first) +
                                  " appears more than once in '" + path.string() + "'");
    rec.times.reserve(rows.size());
    rec.values.reserve(rows.size());
    for (const auto &[t, v] : rows) {
        rec.times.push_back(t);
        rec.values.push_back(v);
    }
    return rec;
}

TimeSeries interpolate_uniform(const NonuniformRecord &record, double dt,
                               double t_start, double t_end) {
    if (!(dt > 0.0))
        throw ValidationError("interpolate_uniform: dt must be positive");
    if (!(t_end >= t_start))
        throw ValidationError("interpolate_uniform: t_end precedes t_start");
    if (record.size() < 1)
        throw ValidationError("interpolate_uniform: empty record");
    const double slack = 1e-9 * dt;
    if (t_start < record.times.front() - slack || t_end > record.times.back() + slack)
        throw ValidationError(
            "interpolate_uniform: [" + io::format_double(t_start) + ", " +
            io::format_double(t_end) + "] needs extrapolation beyond the record support [" +
            io::format_double(record.times.front()) + ", " +
            io::format_double(record.times.back()) + "]");

    const auto n = static_cast<Eigen::Index>(std::floor((t_end - t_start) / dt + 1e-9)) + 1;
    TimeSeries out;
    out.samples.resize(n, 1);
    out.dt = dt;
    out.t0 = t_start;
    const auto &ts = record.times;
    const auto &vs = record.values;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double t = std::clamp(t_start + static_cast<double>(k) * dt, ts.front(), ts.back());
        auto ub = std::upper_bound(ts.begin(), ts.end(), t);
        const auto i = static_cast<std::size_t>(std::distance(ts.begin(), ub)) - 1;
        if (i + 1 >= ts.size() || ts[i] == t) {
            out.samples(k, 0) = vs[i];
            continue;
        }
        const double w = (t - ts[i]) / (ts[i + 1] - ts[i]);
        out.samples(k, 0) = vs[i] + (vs[i + 1] - vs[i]) * w;
    }
    return out;
}

FieldStack load_field_stack(const std::filesystem::path &path,
                            std::optional<double> sentinel_override,
                            std::optional<std::pair<int, int>> expected_grid) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("load_field_stack: cannot open '" + path.string() + "'");
    std::string line;
    std::size_t lineno = 0;
    int rows = 0, cols = 0, nt = 0;
    double sentinel = 0.0, dt = 1.0, t0 = 0.0;
    bool have_header = false;
    while (!have_header && std::getline(in, line)) {
        ++lineno;
        auto f = io::split_fields(line);
        if (f.empty() || f.front().front() == '#')
            continue;
        double vals[6];
        bool ok = f.size() == 7 && f[0] == "fieldstack";
        for (std::size_t k = 0; ok && k < 6; ++k)
            ok = io::parse_double(f[k + 1], vals[k]);
        if (!ok)
            throw ValidationError(where(path, lineno) +
                                  ": expected 'fieldstack <rows> <cols> <snapshots> "
                                  "<sentinel> <dt> <t0>'");
        rows = static_cast<int>(vals[0]);
        cols = static_cast<int>(vals[1]);
        nt = static_cast<int>(vals[2]);
        sentinel = vals[3];
        dt = vals[4];
        t0 = vals[5];
        have_header = true;
    }
    if (!have_header)
        throw ValidationError("load_field_stack: no header in '" + path.string() + "'");
    if (rows < 1 || cols < 1 || nt < 1 || !(dt > 0.0))
        throw ValidationError(where(path, lineno) + ": grid dimensions, snapshot count "
                                                    "and dt must be positive");
    if (expected_grid && (expected_grid->first != rows || expected_grid->second != cols))
        throw ValidationError("load_field_stack: grid " + std::to_string(rows) + "x" +
                              std::to_string(cols) + " does not match expected " +
                              std::to_string(expected_grid->first) + "x" +
                              std::to_string(expected_grid->second));
    if (sentinel_override)
        sentinel = *sentinel_override;

    const Eigen::Index g = static_cast<Eigen::Index>(rows) * cols;
    Eigen::MatrixXd full(nt, g);
    std::vector<bool> missing(static_cast<std::size_t>(g), false);
    auto is_missing = [&](double v) {
        return std::isnan(v) || (!std::isnan(sentinel) && v == sentinel);
    };
    int t = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto f = io::split_fields(line);
        if (f.empty() || f.front().front() == '#')
            continue;
        if (t >= nt)
            throw ValidationError(where(path, lineno) + ": more than the declared " +
                                  std::to_string(nt) + " snapshots");
        if (static_cast<Eigen::Index>(f.size()) != g)
            throw ValidationError(where(path, lineno) + ": snapshot " + std::to_string(t) +
                                  " has " + std::to_string(f.size()) +
                                  " values, grid needs " + std::to_string(g));
        for (Eigen::Index k = 0; k < g; ++k) {
            double v;
            if (!io::parse_double(f[static_cast<std::size_t>(k)], v))
                throw ValidationError(where(path, lineno) + ": cannot parse value " +
                                      std::to_string(k));
            full(t, k) = v;
            if (is_missing(v))
                missing[static_cast<std::size_t>(k)] = true;
        }
        ++t;
    }
    if (t != nt)
        throw ValidationError("load_field_stack: header declares " + std::to_string(nt) +
                              " snapshots, file has " + std::to_string(t));

    FieldStack fs;
    fs.sentinel = sentinel;
    fs.mask.rows = rows;
    fs.mask.cols = cols;
    for (Eigen::Index k = 0; k < g; ++k)
        if (!missing[static_cast<std::size_t>(k)])
            fs.mask.kept.push_back(k);
    if (fs.mask.kept.empty())
        throw ValidationError("load_field_stack: every gridpoint is missing");
    fs.series.samples.resize(nt, static_cast<Eigen::Index>(fs.mask.kept.size()));
    for (std::size_t c = 0; c < fs.mask.kept.size(); ++c)
        fs.series.samples.col(static_cast<Eigen::Index>(c)) = full.col(fs.mask.kept[c]);
    fs.series.dt = dt;
    fs.series.t0 = t0;
    return fs;
}

void write_field_stack(const std::filesystem::path &path, int rows, int cols,
                       const Eigen::MatrixXd &snapshots, double sentinel, double dt,
                       double t0) {
    if (snapshots.cols() != static_cast<Eigen::Index>(rows) * cols)
        throw ValidationError("write_field_stack: snapshot width does not match grid");
    std::ofstream out(path);
    if (!out)
        throw ValidationError("write_field_stack: cannot write '" + path.string() + "'");
    out << "fieldstack " << rows << ' ' << cols << ' ' << snapshots.rows() << ' '
        << io::format_double(sentinel) << ' ' << io::format_double(dt) << ' '
        << io::format_double(t0) << '\n';
    for (Eigen::Index t = 0; t < snapshots.rows(); ++t) {
        for (Eigen::Index k = 0; k < snapshots.cols(); ++k)
            out << (k ? " " : "") << io::format_double(snapshots(t, k));
        out << '\n';
    }
}

Eigen::VectorXd scatter_back(const GridMask &mask, const Eigen::VectorXd &kept, double fill) {
    if (kept.size() != static_cast<Eigen::Index>(mask.kept.size()))
        throw ValidationError("scatter_back: " + std::to_string(kept.size()) +
                              " values for " + std::to_string(mask.kept.size()) +
                              " kept gridpoints");
    Eigen::VectorXd grid = Eigen::VectorXd::Constant(mask.grid_size(), fill);
    for (std::size_t c = 0; c < mask.kept.size(); ++c)
        grid[mask.kept[c]] = kept[static_cast<Eigen::Index>(c)];
    return grid;
}

TimeSeries anomalies(const TimeSeries &series, Eigen::Index window_start,
                     Eigen::Index window_end, int cycle) {
    if (cycle < 1)
        throw ValidationError("anomalies: cycle length must be positive");
    if (window_start < 0 || window_end > series.length() || window_start >= window_end)
        throw ValidationError("anomalies: climatology window [" + std::to_string(window_start) +
                              ", " + std::to_string(window_end) +
                              ") lies outside the series of length " +
                              std::to_string(series.length()));
    if (window_end - window_start < cycle)
        throw ValidationError("anomalies: climatology window shorter than one cycle");
    const Eigen::Index d = series.dim();
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(cycle, d);
    Eigen::VectorXd count = Eigen::VectorXd::Zero(cycle);
    for (Eigen::Index i = window_start; i < window_end; ++i) {
        mean.row(i % cycle) += series.samples.row(i);
        count[i % cycle] += 1.0;
    }
    for (Eigen::Index p = 0; p < cycle; ++p)
        mean.row(p) /= count[p];
    TimeSeries out = series;
    for (Eigen::Index i = 0; i < series.length(); ++i)
        out.samples.row(i) -= mean.row(i % cycle);
    return out;
}

TimeSeries slice(const TimeSeries &series, Eigen::Index offset, Eigen::Index length) {
    if (offset < 0 || length < 0 || offset + length > series.length())
        throw ValidationError("slice: rows [" + std::to_string(offset) + ", " +
                              std::to_string(offset + length) + ") outside series of length " +
                              std::to_string(series.length()));
    TimeSeries out;
    out.samples = series.samples.middleRows(offset, length);
    out.dt = series.dt;
    out.t0 = series.time(offset);
    out.time_unit = series.time_unit;
    out.value_unit = series.value_unit;
    return out;
}

void write_timeseries(const TimeSeries &series, const std::filesystem::path &path) {
    io::TableWriter w(path);
    w.meta("dt", series.dt);
    w.meta("t0", series.t0);
    w.meta("time_unit", series.time_unit);
    w.meta("value_unit", series.value_unit);
    std::vector<std::string> cols{"time"};
    for (Eigen::Index c = 0; c < series.dim(); ++c)
        cols.push_back("v" + std::to_string(c));
    w.header(cols);
    std::vector<double> row(static_cast<std::size_t>(series.dim()) + 1);
    for (Eigen::Index i = 0; i < series.length(); ++i) {
        row[0] = series.time(i);
        for (Eigen::Index c = 0; c < series.dim(); ++c)
            row[static_cast<std::size_t>(c) + 1] = series.samples(i, c);
        w.row(row);
    }
}

TimeSeries read_timeseries(const std::filesystem::path &path) {
    const io::Table t = io::read_table(path);
    if (t.rows.empty() || t.columns.size() < 2)
        throw ValidationError("read_timeseries: '" + path.string() + "' has no samples");
    TimeSeries ts;
    const auto d = static_cast<Eigen::Index>(t.columns.size()) - 1;
    ts.samples.resize(static_cast<Eigen::Index>(t.rows.size()), d);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (static_cast<Eigen::Index>(t.rows[i].size()) != d + 1)
            throw ValidationError("read_timeseries: ragged row " + std::to_string(i + 1) +
                                  " in '" + path.string() + "'");
        for (Eigen::Index c = 0; c < d; ++c)
            ts.samples(static_cast<Eigen::Index>(i), c) = t.rows[i][static_cast<std::size_t>(c) + 1];
    }
    auto num = [&](const char *key, double fallback) {
        const std::string *v = t.find_meta(key);
        double x;
        return v && io::parse_double(*v, x) ? x : fallback;
    };
    ts.t0 = num("t0", t.rows.front().front());
    ts.dt = num("dt", t.rows.size() > 1 ? t.rows[1][0] - t.rows[0][0] : 1.0);
    if (const auto *u = t.find_meta("time_unit"))
        ts.time_unit = *u;
    if (const auto *u = t.find_meta("value_unit"))
        ts.value_unit = *u;
    return ts;
}

} // namespace data
} // namespace trendop
