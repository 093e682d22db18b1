#include "trendop/pipeline.hpp"

#include "trendop/error.hpp"
#include "trendop/io.hpp"

#include <fstream>
#include <sstream>

namespace trendop::pipeline {

namespace {

using json = nlohmann::json;

const char *to_string(Source s) {
    switch (s) {
    case Source::synthetic: return "synthetic";
    case Source::scalar_file: return "scalar";
    case Source::field_stack: return "field";
    }
    return "?";
}

Source source_from_string(const std::string &s) {
    if (s == "synthetic") return Source::synthetic;
    if (s == "scalar") return Source::scalar_file;
    if (s == "field") return Source::field_stack;
    throw ValidationError("unknown input source '" + s +
                          "' (expected synthetic, scalar or field)");
}

void reject_unknown(const json &obj, const char *section,
                    std::initializer_list<const char *> allowed) {
    if (!obj.is_object())
        throw ValidationError(std::string("config: '") + section + "' must be an object");
    for (const auto &[key, _] : obj.items()) {
        bool ok = false;
        for (const char *a : allowed)
            ok = ok || key == a;
        if (!ok)
            throw ValidationError(std::string("config: unknown key '") + key + "' in '" +
                                  section + "'");
    }
}

template <class T> void read_opt(const json &obj, const char *key, T &field) {
    if (obj.contains(key))
        field = obj.at(key).get<T>();
}

template <class T> void read_opt(const json &obj, const char *key, std::optional<T> &field) {
    if (obj.contains(key))
        field = obj.at(key).get<T>();
}

std::string params(const RunConfig &c) {
    std::ostringstream os;
    os << "Q=" << c.Q << ", lag=" << c.lag << ", step=" << c.step << ", knn=" << c.knn
       << ", modes=" << c.modes;
    return os.str();
}

template <class F> auto stage(const std::string &name, F &&f) {
    try {
        return f();
    } catch (const Error &e) {
        rethrow_with_stage(e, name);
    }
}

} // namespace

void RunConfig::validate() const {
    auto positive = [](const char *name, long v) {
        if (v < 1)
            throw ValidationError(std::string("config: ") + name + " must be >= 1, got " +
                                  std::to_string(v));
    };
    positive("embedding.Q", Q);
    positive("embedding.lag", lag);
    positive("operator.step", step);
    positive("operator.knn", knn);
    positive("operator.modes", modes);
    if (interp_dt && !(*interp_dt > 0.0))
        throw ValidationError("config: preprocess.dt must be positive");
    if (t_start && t_end && !(*t_start < *t_end))
        throw ValidationError("config: preprocess.t_start must precede t_end");
    if (anomaly) {
        positive("preprocess.anomaly.cycle", anomaly->cycle);
        if (anomaly->start < 0 || anomaly->end <= anomaly->start)
            throw ValidationError("config: anomaly window [" + std::to_string(anomaly->start) +
                                  ", " + std::to_string(anomaly->end) + ") is empty");
    }
    if (source == Source::synthetic) {
        model.validate();
    } else {
        if (path.empty())
            throw ValidationError("config: input.path is required for a " +
                                  std::string(to_string(source)) + " source");
        if (!std::filesystem::is_regular_file(path))
            throw ValidationError("config: input file '" + path.string() + "' does not exist");
    }
}

json config_to_json(const RunConfig &cfg) {
    json in;
    in["source"] = to_string(cfg.source);
    switch (cfg.source) {
    case Source::synthetic:
        in["model"] = models::config_to_json(cfg.model);
        break;
    case Source::scalar_file:
        in["path"] = cfg.path.string();
        in["time_column"] = cfg.columns.time_column;
        in["value_column"] = cfg.columns.value_column;
        in["header_lines"] = cfg.columns.header_lines;
        in["time_is_age"] = cfg.columns.time_is_age;
        if (cfg.columns.min_time)
            in["min_time"] = *cfg.columns.min_time;
        if (cfg.columns.max_time)
            in["max_time"] = *cfg.columns.max_time;
        break;
    case Source::field_stack:
        in["path"] = cfg.path.string();
        if (cfg.sentinel)
            in["sentinel"] = *cfg.sentinel;
        break;
    }
    json pre = json::object();
    if (cfg.interp_dt)
        pre["dt"] = *cfg.interp_dt;
    if (cfg.t_start)
        pre["t_start"] = *cfg.t_start;
    if (cfg.t_end)
        pre["t_end"] = *cfg.t_end;
    if (cfg.anomaly)
        pre["anomaly"] = {{"start", cfg.anomaly->start},
                          {"end", cfg.anomaly->end},
                          {"cycle", cfg.anomaly->cycle},
                          {"feed_operator", cfg.anomaly->feed_operator}};
    json j;
    j["input"] = in;
    j["preprocess"] = pre;
    j["embedding"] = {{"Q", cfg.Q}, {"lag", cfg.lag}};
    j["operator"] = {{"step", cfg.step},
                     {"knn", cfg.knn},
                     {"modes", cfg.modes},
                     {"duplicates", op::to_string(cfg.duplicates)}};
    j["output"] = {{"dir", cfg.out_dir.string()},
                   {"write_operator", cfg.write_operator},
                   {"write_embedding", cfg.write_embedding}};
    return j;
}

RunConfig config_from_json(const json &j, const std::filesystem::path &base_dir) {
    RunConfig cfg;
    try {
        reject_unknown(j, "config", {"input", "preprocess", "embedding", "operator", "output"});
        if (j.contains("input")) {
            const json &in = j.at("input");
            reject_unknown(in, "input",
                           {"source", "model", "path", "time_column", "value_column",
                            "header_lines", "time_is_age", "min_time", "max_time",
                            "sentinel"});
            cfg.source = source_from_string(in.value("source", std::string("synthetic")));
            if (in.contains("model"))
                cfg.model = models::config_from_json(in.at("model"));
            if (in.contains("path")) {
                std::filesystem::path p = in.at("path").get<std::string>();
                cfg.path = (p.is_relative() && !base_dir.empty()) ? base_dir / p : p;
            }
            read_opt(in, "time_column", cfg.columns.time_column);
            read_opt(in, "value_column", cfg.columns.value_column);
            read_opt(in, "header_lines", cfg.columns.header_lines);
            read_opt(in, "time_is_age", cfg.columns.time_is_age);
            read_opt(in, "min_time", cfg.columns.min_time);
            read_opt(in, "max_time", cfg.columns.max_time);
            read_opt(in, "sentinel", cfg.sentinel);
        }
        if (j.contains("preprocess")) {
            const json &pre = j.at("preprocess");
            reject_unknown(pre, "preprocess", {"dt", "t_start", "t_end", "anomaly"});
            read_opt(pre, "dt", cfg.interp_dt);
            read_opt(pre, "t_start", cfg.t_start);
            read_opt(pre, "t_end", cfg.t_end);
            if (pre.contains("anomaly")) {
                const json &a = pre.at("anomaly");
                reject_unknown(a, "preprocess.anomaly",
                               {"start", "end", "cycle", "feed_operator"});
                AnomalyWindow w;
                w.start = a.at("start").get<long>();
                w.end = a.at("end").get<long>();
                read_opt(a, "cycle", w.cycle);
                read_opt(a, "feed_operator", w.feed_operator);
                cfg.anomaly = w;
            }
        }
        if (j.contains("embedding")) {
            const json &e = j.at("embedding");
            reject_unknown(e, "embedding", {"Q", "lag"});
            read_opt(e, "Q", cfg.Q);
            read_opt(e, "lag", cfg.lag);
        }
        if (j.contains("operator")) {
            const json &o = j.at("operator");
            reject_unknown(o, "operator", {"step", "knn", "modes", "duplicates"});
            read_opt(o, "step", cfg.step);
            read_opt(o, "knn", cfg.knn);
            read_opt(o, "modes", cfg.modes);
            if (o.contains("duplicates"))
                cfg.duplicates =
                    op::duplicate_policy_from_string(o.at("duplicates").get<std::string>());
        }
        if (j.contains("output")) {
            const json &o = j.at("output");
            reject_unknown(o, "output", {"dir", "write_operator", "write_embedding"});
            if (o.contains("dir"))
                cfg.out_dir = o.at("dir").get<std::string>();
            read_opt(o, "write_operator", cfg.write_operator);
            read_opt(o, "write_embedding", cfg.write_embedding);
        }
    } catch (const json::exception &e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config file '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

RunConfig lr04_config(const std::filesystem::path &stack_file) {
    RunConfig cfg;
    cfg.source = Source::scalar_file;
    cfg.path = stack_file;
    cfg.columns = data::lr04_columns(3000.0);
    cfg.interp_dt = 1.0;
    cfg.t_start = -3000.0;
    cfg.t_end = 0.0;
    cfg.Q = 5;
    cfg.lag = 10;
    cfg.step = 7;
    cfg.knn = 7;
    return cfg;
}

RunConfig model_config(models::Kind kind) {
    RunConfig cfg;
    cfg.source = Source::synthetic;
    cfg.model = models::default_config(kind);
    cfg.Q = 3;
    cfg.step = 1;
    if (kind == models::Kind::M || kind == models::Kind::A) {
        cfg.lag = embed::suggest_lag(cfg.model.alpha);
        cfg.knn = 7;
    } else {
        cfg.lag = 10;
        cfg.knn = 25;
    }
    return cfg;
}

LoadedInput load_input(const RunConfig &cfg) {
    LoadedInput in;
    switch (cfg.source) {
    case Source::synthetic: {
        in.trajectory = models::simulate(cfg.model);
        in.series = in.trajectory->series();
        break;
    }
    case Source::scalar_file: {
        const auto rec = data::load_scalar_record(cfg.path, cfg.columns);
        if (rec.reordered)
            in.notices.push_back("'" + cfg.path.string() +
                                 "' was not in time order and has been sorted");
        if (rec.size() < 2)
            throw ValidationError("'" + cfg.path.string() + "' holds fewer than two samples");
        const double dt = cfg.interp_dt.value_or(1.0);
        const double t0 = cfg.t_start.value_or(rec.times.front());
        const double t1 = cfg.t_end.value_or(rec.times.back());
        in.series = data::interpolate_uniform(rec, dt, t0, t1);
        break;
    }
    case Source::field_stack: {
        auto fs = data::load_field_stack(cfg.path, cfg.sentinel);
        in.series = std::move(fs.series);
        in.mask = std::move(fs.mask);
        break;
    }
    }
    in.target = in.series;
    if (cfg.anomaly) {
        in.target = data::anomalies(in.series, cfg.anomaly->start, cfg.anomaly->end,
                                    cfg.anomaly->cycle);
        if (cfg.anomaly->feed_operator)
            in.series = in.target;
    }
    return in;
}

Analysis analyze(const RunConfig &cfg) {
    stage("validate", [&] {
        cfg.validate();
        return 0;
    });
    return analyze(cfg, stage("load " + std::string(to_string(cfg.source)),
                              [&] { return load_input(cfg); }));
}

Analysis analyze(const RunConfig &cfg, LoadedInput input) {
    Analysis a;
    a.config = cfg;
    a.series = std::move(input.series);
    a.target = std::move(input.target);
    a.mask = std::move(input.mask);
    a.trajectory = std::move(input.trajectory);
    a.notices = std::move(input.notices);

    const long needed = static_cast<long>(cfg.Q - 1) * cfg.lag + cfg.step;
    if (needed >= static_cast<long>(a.series.length()))
        throw ValidationError("validate (" + params(cfg) + "): (Q-1)*lag + step = " +
                              std::to_string(needed) + " must be below the series length " +
                              std::to_string(a.series.length()));

    a.embedded = stage("embed (Q=" + std::to_string(cfg.Q) + ", lag=" + std::to_string(cfg.lag) +
                           ")",
                       [&] { return embed::delay_embed(a.series, cfg.Q, cfg.lag); });
    a.op = stage("operator (step=" + std::to_string(cfg.step) +
                     ", knn=" + std::to_string(cfg.knn) + ")",
                 [&] {
                     auto op = op::build_operator(a.embedded, cfg.step, cfg.knn, cfg.duplicates);
                     op.dt = a.series.dt;
                     return op;
                 });
    a.dec = stage("eigendecompose (modes=" + std::to_string(cfg.modes) + ")",
                  [&] { return op::eigendecompose(a.op, cfg.modes); });
    a.aligned_target = data::slice(a.target, a.offset(), a.length());
    a.modes = stage("classify", [&] { return spectral::classify_modes(a.dec, a.aligned_target); });
    return a;
}

std::vector<std::filesystem::path> write_analysis(const Analysis &a,
                                                  const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;

    auto eig = dir / "eigenvalues.tsv";
    op::write_eigenvalues(a.dec, eig);
    written.push_back(eig);

    auto modes = dir / "modes.tsv";
    spectral::write_mode_table(a.modes, modes);
    written.push_back(modes);

    auto series = dir / "mode_series.tsv";
    {
        io::TableWriter w(series);
        w.meta("time_unit", a.series.time_unit);
        w.meta("offset", static_cast<double>(a.offset()));
        std::vector<std::string> cols{"time"};
        for (int j = 0; j < a.dec.size(); ++j) {
            cols.push_back("re" + std::to_string(j + 1));
            cols.push_back("im" + std::to_string(j + 1));
        }
        w.header(cols);
        std::vector<double> row(cols.size());
        for (Eigen::Index i = 0; i < a.length(); ++i) {
            row[0] = a.time(i);
            for (int j = 0; j < a.dec.size(); ++j) {
                row[1 + 2 * j] = a.dec.right(i, j).real();
                row[2 + 2 * j] = a.dec.right(i, j).imag();
            }
            w.row(row);
        }
    }
    written.push_back(series);

    if (a.config.write_operator) {
        auto p = dir / "operator.tsv";
        op::write_matrix(a.op.P, p);
        written.push_back(p);
    }
    if (a.config.write_embedding) {
        auto p = dir / "embedding.tsv";
        embed::write_embedding(a.embedded, p);
        written.push_back(p);
    }

    auto cfg = dir / "resolved_config.json";
    {
        RunConfig resolved = a.config;
        if (a.trajectory)
            resolved.model = a.trajectory->config;
        std::ofstream out(cfg);
        out << config_to_json(resolved).dump(2) << '\n';
    }
    written.push_back(cfg);
    return written;
}

Reconstruction reconstruct(const Analysis &a, std::set<int> indices, const TimeSeries *target) {
    Reconstruction r;
    r.added = spectral::close_under_conjugation(a.dec, indices);
    const TimeSeries aligned =
        target ? data::slice(*target, a.offset(), a.length()) : a.aligned_target;
    r.projection = spectral::project(a.dec, indices, aligned.samples);
    return r;
}

std::vector<std::filesystem::path> write_reconstruction(const Analysis &a,
                                                        const Reconstruction &r,
                                                        const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    const Eigen::MatrixXd values = r.projection.real_part();

    std::string modes;
    for (int j : r.projection.indices)
        modes += (modes.empty() ? "" : ",") + std::to_string(j + 1);

    auto path = dir / "projection.tsv";
    {
        io::TableWriter w(path);
        w.meta("modes", modes);
        w.meta("max_imag", r.projection.max_imag);
        std::vector<std::string> cols{"time"};
        for (Eigen::Index c = 0; c < values.cols(); ++c)
            cols.push_back(values.cols() == 1 ? "value" : "v" + std::to_string(c));
        w.header(cols);
        std::vector<double> row(cols.size());
        for (Eigen::Index i = 0; i < values.rows(); ++i) {
            row[0] = a.time(i);
            for (Eigen::Index c = 0; c < values.cols(); ++c)
                row[static_cast<std::size_t>(c) + 1] = values(i, c);
            w.row(row);
        }
    }
    written.push_back(path);

    if (a.mask) {
        auto grid = dir / "projection_grid.tsv";
        io::TableWriter w(grid);
        w.meta("rows", static_cast<double>(a.mask->rows));
        w.meta("cols", static_cast<double>(a.mask->cols));
        w.meta("modes", modes);
        std::vector<std::string> cols{"time"};
        for (Eigen::Index c = 0; c < a.mask->grid_size(); ++c)
            cols.push_back("g" + std::to_string(c));
        w.header(cols);
        std::vector<double> row(cols.size());
        for (Eigen::Index i = 0; i < values.rows(); ++i) {
            const Eigen::VectorXd full = data::scatter_back(*a.mask, values.row(i).transpose());
            row[0] = a.time(i);
            for (Eigen::Index c = 0; c < full.size(); ++c)
                row[static_cast<std::size_t>(c) + 1] = full[c];
            w.row(row);
        }
        written.push_back(grid);
    }
    return written;
}

} // namespace trendop::pipeline
