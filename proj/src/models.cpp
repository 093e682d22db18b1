#include "trendop/models.hpp"

#include "trendop/error.hpp"
#include "trendop/io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

namespace trendop::models {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

bool is_switching(Kind k) { return k == Kind::F || k == Kind::Fprime; }

// Reduction happens only here so that the phase itself accumulates in R.
double cos_phase(double theta) { return std::cos(std::remainder(theta, two_pi)); }

// x0 from the seed; uses the raw 64-bit stream so the value does not depend
// on the standard library's distribution implementation.
double seeded_x0(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return 0.5 * u;
}

} // namespace

double tent_map_step(double x, double delta) {
    if (!(x >= 0.0 && x <= 1.0))
        throw ValidationError("tent_map_step: x = " + io::format_double(x) +
                              " outside [0,1]");
    if (!(delta > 0.0 && delta < 1.0))
        throw ValidationError("tent_map_step: delta must lie in (0,1)");
    if (x < 0.25)
        return 2.0 * x;
    if (x < 0.75)
        return std::fmod(delta + 2.0 * (x - 0.25), 1.0);
    return 0.5 + 2.0 * (x - 0.75);
}

double switching_weight(double x, double c) {
    return 0.5 * (1.0 + std::tanh(c * (x - 0.5)));
}

double drift_increment(const ModelConfig &cfg, double t) {
    return cfg.d0 + t * (cfg.d1 + t * cfg.d2);
}

void ModelConfig::validate() const {
    if (n_steps < 1)
        throw ValidationError("model: n_steps must be positive");
    if (is_switching(kind)) {
        if (!(delta > 0.0 && delta < 1.0))
            throw ValidationError("model: delta = " + io::format_double(delta) +
                                  " must lie in (0,1)");
        if (!(c > 0.0) || !std::isfinite(c))
            throw ValidationError("model: switching sharpness c must be positive");
        if (alpha1 == alpha2)
            throw ValidationError("model: alpha1 and alpha2 must differ");
        if (!std::isfinite(alpha1) || !std::isfinite(alpha2))
            throw ValidationError("model: rotation rates must be finite");
        if (x0 && !(*x0 >= 0.0 && *x0 <= 1.0))
            throw ValidationError("model: x0 must lie in [0,1] for F and F'");
    } else {
        if (!std::isfinite(alpha))
            throw ValidationError("model: alpha must be finite");
        if (!std::isfinite(base_amplitude))
            throw ValidationError("model: base amplitude must be finite");
        if (!std::isfinite(d0) || !std::isfinite(d1) || !std::isfinite(d2) ||
            !std::isfinite(drift_span))
            throw ValidationError("model: drift coefficients must be finite");
        if (x0 && !std::isfinite(*x0))
            throw ValidationError("model: x0 must be finite");
    }
    if (!std::isfinite(theta0) || !std::isfinite(theta2_0))
        throw ValidationError("model: initial phases must be finite");
}

ModelConfig ModelConfig::resolved() const {
    ModelConfig r = *this;
    if (!r.x0)
        r.x0 = is_switching(kind) ? seeded_x0(seed) : 0.0;
    const double n = static_cast<double>(n_steps);
    switch (drift) {
    case DriftLaw::linear:
        // x_t = x0 + span * t / n
        r.d0 = drift_span / n;
        r.d1 = 0.0;
        r.d2 = 0.0;
        break;
    case DriftLaw::quadratic: {
        // x_t = x0 + span * (2 t/tp - t^2/tp^2): rises to x0 + span at
        // tp = 0.65 n and falls back to about 0.7 span by the end.
        const double tp = 0.65 * n;
        r.d0 = drift_span * (2.0 * tp - 1.0) / (tp * tp);
        r.d1 = -2.0 * drift_span / (tp * tp);
        r.d2 = 0.0;
        break;
    }
    case DriftLaw::custom:
        break;
    }
    return r;
}

ModelConfig default_config(Kind kind) {
    ModelConfig cfg;
    cfg.kind = kind;
    cfg.n_steps = is_switching(kind) ? 2000 : 1000;
    return cfg;
}

Trajectory simulate(const ModelConfig &config) {
    config.validate();
    Trajectory traj;
    traj.config = config.resolved();
    const ModelConfig &cfg = traj.config;
    const auto n = static_cast<std::size_t>(cfg.n_steps);
    traj.states.reserve(n);
    traj.observations.reserve(n);

    State s{0.0, *cfg.x0, cfg.theta0, cfg.theta2_0};
    for (std::size_t k = 0; k < n; ++k) {
        traj.states.push_back(s);
        switch (cfg.kind) {
        case Kind::M:
            traj.observations.push_back(s.x + cos_phase(s.theta));
            s.x += drift_increment(cfg, s.t);
            s.theta += cfg.alpha;
            break;
        case Kind::A:
            traj.observations.push_back((cfg.base_amplitude + s.x) *
                                        cos_phase(s.theta));
            s.x += drift_increment(cfg, s.t);
            s.theta += cfg.alpha;
            break;
        case Kind::F: {
            traj.observations.push_back(cos_phase(s.theta));
            const double w = switching_weight(s.x, cfg.c);
            s.theta += w * cfg.alpha1 + (1.0 - w) * cfg.alpha2;
            s.x = tent_map_step(s.x, cfg.delta);
            break;
        }
        case Kind::Fprime: {
            // Phases are in radians, so cos(theta) here is the turn-based
            // cos(2 pi theta) of the original formulation.
            const double w = switching_weight(s.x, cfg.c);
            traj.observations.push_back(w * cos_phase(s.theta) +
                                        (1.0 - w) * cos_phase(s.theta2));
            s.theta += cfg.alpha1;
            s.theta2 += cfg.alpha2;
            s.x = tent_map_step(s.x, cfg.delta);
            break;
        }
        }
        s.t += 1.0;
    }
    return traj;
}

TimeSeries Trajectory::series() const {
    return TimeSeries::scalar(observations, 1.0, 0.0);
}

std::vector<double> Trajectory::regime() const {
    std::vector<double> x;
    x.reserve(states.size());
    for (const auto &s : states)
        x.push_back(s.x);
    return x;
}

std::string to_string(Kind kind) {
    switch (kind) {
    case Kind::M: return "M";
    case Kind::A: return "A";
    case Kind::F: return "F";
    case Kind::Fprime: return "Fprime";
    }
    return "?";
}

Kind kind_from_string(const std::string &s) {
    if (s == "M" || s == "m") return Kind::M;
    if (s == "A" || s == "a") return Kind::A;
    if (s == "F" || s == "f") return Kind::F;
    if (s == "Fprime" || s == "F'" || s == "fprime") return Kind::Fprime;
    throw ValidationError("unknown model kind '" + s +
                          "' (expected M, A, F or Fprime)");
}

std::string to_string(DriftLaw law) {
    switch (law) {
    case DriftLaw::linear: return "linear";
    case DriftLaw::quadratic: return "quadratic";
    case DriftLaw::custom: return "custom";
    }
    return "?";
}

DriftLaw drift_from_string(const std::string &s) {
    if (s == "linear") return DriftLaw::linear;
    if (s == "quadratic") return DriftLaw::quadratic;
    if (s == "custom") return DriftLaw::custom;
    throw ValidationError("unknown drift law '" + s +
                          "' (expected linear, quadratic or custom)");
}

nlohmann::json config_to_json(const ModelConfig &cfg) {
    nlohmann::json j;
    j["kind"] = to_string(cfg.kind);
    j["n_steps"] = cfg.n_steps;
    j["seed"] = cfg.seed;
    j["theta0"] = cfg.theta0;
    if (cfg.x0)
        j["x0"] = *cfg.x0;
    if (is_switching(cfg.kind)) {
        j["alpha1"] = cfg.alpha1;
        j["alpha2"] = cfg.alpha2;
        j["delta"] = cfg.delta;
        j["c"] = cfg.c;
        if (cfg.kind == Kind::Fprime)
            j["theta2_0"] = cfg.theta2_0;
    } else {
        j["alpha"] = cfg.alpha;
        j["drift"] = to_string(cfg.drift);
        j["drift_span"] = cfg.drift_span;
        j["drift_coefficients"] = {cfg.d0, cfg.d1, cfg.d2};
        j["base_amplitude"] = cfg.base_amplitude;
    }
    return j;
}

ModelConfig config_from_json(const nlohmann::json &j) {
    try {
        ModelConfig cfg = default_config(kind_from_string(j.at("kind").get<std::string>()));
        auto opt = [&](const char *key, auto &field) {
            if (j.contains(key))
                field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
        };
        opt("n_steps", cfg.n_steps);
        opt("seed", cfg.seed);
        opt("theta0", cfg.theta0);
        opt("theta2_0", cfg.theta2_0);
        opt("alpha", cfg.alpha);
        opt("alpha1", cfg.alpha1);
        opt("alpha2", cfg.alpha2);
        opt("delta", cfg.delta);
        opt("c", cfg.c);
        opt("drift_span", cfg.drift_span);
        opt("base_amplitude", cfg.base_amplitude);
        if (j.contains("x0"))
            cfg.x0 = j.at("x0").get<double>();
        if (j.contains("drift"))
            cfg.drift = drift_from_string(j.at("drift").get<std::string>());
        if (j.contains("drift_coefficients")) {
            auto c = j.at("drift_coefficients").get<std::vector<double>>();
            if (c.size() > 3)
                throw ValidationError("model: at most three drift coefficients");
            c.resize(3, 0.0);
            cfg.d0 = c[0];
            cfg.d1 = c[1];
            cfg.d2 = c[2];
            if (!j.contains("drift"))
                cfg.drift = DriftLaw::custom;
        }
        return cfg;
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("model config: ") + e.what());
    }
}

std::vector<std::filesystem::path>
write_trajectory(const Trajectory &traj, const std::filesystem::path &dir,
                 const std::string &stem) {
    std::filesystem::create_directories(dir);
    const auto series_path = dir / (stem + ".tsv");
    const auto meta_path = dir / (stem + ".json");
    {
        io::TableWriter w(series_path);
        w.header({"step", "observation"});
        for (std::size_t k = 0; k < traj.observations.size(); ++k)
            w.row({static_cast<double>(k), traj.observations[k]});
    }
    nlohmann::json meta;
    meta["model"] = config_to_json(traj.config);
    meta["length"] = traj.observations.size();
    meta["generator"] = "mt19937_64 (x0 only)";
    meta["series_file"] = series_path.filename().string();
    if (traj.config.kind == Kind::F || traj.config.kind == Kind::Fprime) {
        std::size_t switches = 0;
        for (std::size_t k = 1; k < traj.states.size(); ++k)
            switches += (traj.states[k].x >= 0.5) != (traj.states[k - 1].x >= 0.5);
        meta["regime_switches"] = switches;
    }
    std::ofstream out(meta_path);
    if (!out)
        throw ValidationError("cannot write '" + meta_path.string() + "'");
    out << meta.dump(2) << '\n';
    return {series_path, meta_path};
}

} // namespace trendop::models
