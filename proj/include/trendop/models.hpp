#ifndef TRENDOP_MODELS_HPP
#define TRENDOP_MODELS_HPP

#include "trendop/timeseries.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace trendop::models {

/// M: oscillation with a drift in the mean, h = x + cos(theta).
/// A: drift in the amplitude, h = (a + x) cos(theta).
/// F: rotation rate switches with the metastable regime x, h = cos(theta).
/// Fprime: two phases always rotate; the regime weights which one is seen.
enum class Kind { M, A, F, Fprime };

/// Named presets for the increment polynomial d(t) = d0 + d1 t + d2 t^2
/// that drives x in Models M and A. `linear` and `quadratic` describe the
/// shape of x(t) (the drift in the mean or amplitude), not of d(t).
enum class DriftLaw { linear, quadratic, custom };

struct ModelConfig {
    Kind kind = Kind::M;
    int n_steps = 1000;

    // M, A
    double alpha = 0.1;
    DriftLaw drift = DriftLaw::linear;
    /// Increment coefficients. Filled from the preset by resolve_drift()
    /// unless drift == custom.
    double d0 = 0.0, d1 = 0.0, d2 = 0.0;
    /// Total rise of x over the run used by the presets.
    double drift_span = 2.0;
    double base_amplitude = 1.0;

    // F, F'
    double alpha1 = 2.0 * 3.14159265358979323846 / 40.0;
    double alpha2 = 2.0 * 3.14159265358979323846 / 97.3537;
    double delta = 7.5e-4;
    double c = 40.0;

    std::uint64_t seed = 0;
    /// Drawn from the seed when absent: uniform on [0, 1/2) for F and F',
    /// zero for M and A.
    std::optional<double> x0;
    double theta0 = 0.0;
    double theta2_0 = 0.0;

    /// Throws ValidationError describing the first violated constraint.
    void validate() const;
    /// Returns a copy with the preset drift coefficients filled in.
    ModelConfig resolved() const;
};

/// Default configuration for a model kind (run length 1000 for M/A,
/// 2000 for F/F').
ModelConfig default_config(Kind kind);

struct State {
    double t;
    double x;
    double theta;
    double theta2; ///< F' only
};

struct Trajectory {
    std::vector<State> states;
    std::vector<double> observations;
    ModelConfig config; ///< resolved (x0 and drift coefficients filled)

    /// Observations as a scalar TimeSeries with unit steps from t = 0.
    TimeSeries series() const;
    /// x_t for every step.
    std::vector<double> regime() const;
};

/// Piecewise metastable map on [0,1]:
///   2x on [0,1/4), delta + 2(x-1/4) mod 1 on [1/4,3/4), 1/2 + 2(x-3/4) on [3/4,1].
double tent_map_step(double x, double delta);

/// w(x) = (1 + tanh(c (x - 1/2))) / 2.
double switching_weight(double x, double c);

/// Drift increment d(t) for Models M and A.
double drift_increment(const ModelConfig &cfg, double t);

Trajectory simulate(const ModelConfig &cfg);

std::string to_string(Kind kind);
Kind kind_from_string(const std::string &s);
std::string to_string(DriftLaw law);
DriftLaw drift_from_string(const std::string &s);

nlohmann::json config_to_json(const ModelConfig &cfg);
ModelConfig config_from_json(const nlohmann::json &j);

/// Writes `<stem>.tsv` (step, observation) and `<stem>.json` (resolved
/// config and run metadata). Returns both paths.
std::vector<std::filesystem::path>
write_trajectory(const Trajectory &traj, const std::filesystem::path &dir,
                 const std::string &stem = "trajectory");

} // namespace trendop::models

#endif
