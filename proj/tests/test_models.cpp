#include "doctest.h"
#include "support.hpp"

#include "trendop/error.hpp"
#include "trendop/models.hpp"

#include <cstring>
#include <fstream>
#include <random>

using namespace trendop;
using models::Kind;

TEST_CASE("tent map branches") {
    CHECK(models::tent_map_step(0.1, 0.1) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(models::tent_map_step(0.5, 0.1) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(models::tent_map_step(0.8, 0.1) == doctest::Approx(0.6).epsilon(1e-15));
    // Branch boundaries are half-open; x = 1 takes the third branch.
    CHECK(models::tent_map_step(0.25, 0.1) == doctest::Approx(0.1));
    CHECK(models::tent_map_step(0.75, 0.1) == doctest::Approx(0.5));
    CHECK(models::tent_map_step(1.0, 0.1) == 1.0);
    // The middle branch wraps modulo 1.
    CHECK(models::tent_map_step(0.7, 0.2) == doctest::Approx(0.1));
}

TEST_CASE("tent map rejects out-of-domain input") {
    CHECK_THROWS_AS(models::tent_map_step(-0.01, 0.1), ValidationError);
    CHECK_THROWS_AS(models::tent_map_step(1.01, 0.1), ValidationError);
    CHECK_THROWS_AS(models::tent_map_step(0.3, 0.0), ValidationError);
    CHECK_THROWS_AS(models::tent_map_step(0.3, 1.0), ValidationError);
}

TEST_CASE("switching weight") {
    CHECK(models::switching_weight(0.5, 40) == 0.5);
    CHECK(models::switching_weight(1.0, 40) == doctest::Approx(1.0).epsilon(1e-15));
    // (1 + tanh(z)) / 2 = 1 / (1 + exp(-2z)) with z = -10.
    const double oracle = 1.0 / (1.0 + std::exp(20.0));
    CHECK(models::switching_weight(0.25, 40) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(oracle == doctest::Approx(2.0611536e-9).epsilon(1e-7));
    double prev = -1.0;
    for (double x = 0.0; x <= 1.0; x += 0.01) {
        const double w = models::switching_weight(x, 40);
        CHECK(w >= prev);
        prev = w;
    }
}

TEST_CASE("initial observations of the drift models") {
    auto m = models::default_config(Kind::M);
    m.drift = models::DriftLaw::custom;
    m.d1 = 0.1;
    const auto tm = models::simulate(m);
    REQUIRE(tm.observations.size() == 1000);
    CHECK(tm.observations[0] == 1.0);
    // x_2 = d(0) + d(1) = 0.1, theta_2 = 0.2
    CHECK(tm.observations[2] == doctest::Approx(0.1 + std::cos(0.2)).epsilon(1e-14));

    auto a = models::default_config(Kind::A);
    a.base_amplitude = 1.0;
    CHECK(models::simulate(a).observations[0] == 1.0);
}

TEST_CASE("drift presets follow their closed forms") {
    auto cfg = models::default_config(Kind::M);
    cfg.drift_span = 2.0;
    const double n = cfg.n_steps;

    cfg.drift = models::DriftLaw::linear;
    auto lin = models::simulate(cfg);
    for (std::size_t t = 0; t < lin.states.size(); t += 97)
        CHECK(lin.states[t].x == doctest::Approx(2.0 * t / n).epsilon(1e-12));

    cfg.drift = models::DriftLaw::quadratic;
    auto quad = models::simulate(cfg);
    const double tp = 0.65 * n;
    std::size_t argmax = 0;
    for (std::size_t t = 0; t < quad.states.size(); ++t) {
        const double tt = static_cast<double>(t);
        CHECK(quad.states[t].x ==
              doctest::Approx(2.0 * (2.0 * tt / tp - tt * tt / (tp * tp))).epsilon(1e-10));
        if (quad.states[t].x > quad.states[argmax].x)
            argmax = t;
    }
    // Rise then fall: interior peak, end value below the peak.
    CHECK(argmax == 650);
    CHECK(quad.states.back().x < quad.states[argmax].x - 0.5);
}

TEST_CASE("model F: x stays in [0,1], length and default x0") {
    auto cfg = models::default_config(Kind::F);
    cfg.seed = 11;
    const auto traj = models::simulate(cfg);
    REQUIRE(traj.observations.size() == 2000);
    REQUIRE(traj.config.x0.has_value());
    CHECK(*traj.config.x0 >= 0.0);
    CHECK(*traj.config.x0 < 0.5);
    for (const auto &s : traj.states) {
        REQUIRE(s.x >= 0.0);
        REQUIRE(s.x <= 1.0);
    }
    for (std::size_t t = 0; t < traj.states.size(); t += 13)
        CHECK(traj.observations[t] == doctest::Approx(std::cos(traj.states[t].theta)));
}

TEST_CASE("model F phase increments follow the regime") {
    auto cfg = models::default_config(Kind::F);
    cfg.n_steps = 20000;
    cfg.seed = 3;
    const auto traj = models::simulate(cfg);
    // Outside (0.45, 0.55) the weight is within (1 - tanh(0.05 c)) / 2 of
    // 0 or 1.
    const double bound =
        std::abs(cfg.alpha1 - cfg.alpha2) * (1.0 - std::tanh(0.05 * cfg.c)) / 2.0;
    std::size_t checked = 0;
    for (std::size_t t = 0; t + 1 < traj.states.size(); ++t) {
        const double x = traj.states[t].x;
        if (x > 0.45 && x < 0.55)
            continue;
        const double inc = traj.states[t + 1].theta - traj.states[t].theta;
        const double expected = x >= 0.5 ? cfg.alpha1 : cfg.alpha2;
        REQUIRE(std::abs(inc - expected) <= bound + 1e-15);
        ++checked;
    }
    CHECK(checked > 15000);
}

namespace {

// Lengths of the completed stays on one side of x = 1/2; the first and last
// (censored) stays are dropped.
std::vector<double> residence_times(const std::vector<double> &x) {
    std::vector<double> out;
    std::size_t start = 0;
    bool first = true;
    for (std::size_t t = 1; t < x.size(); ++t) {
        if ((x[t] >= 0.5) != (x[t - 1] >= 0.5)) {
            if (!first)
                out.push_back(static_cast<double>(t - start));
            first = false;
            start = t;
        }
    }
    return out;
}

} // namespace

TEST_CASE("model F regimes are metastable with mean residence 1/delta") {
    auto cfg = models::default_config(Kind::F);
    cfg.n_steps = 20000;
    std::vector<double> stays;
    std::size_t crossings = 0, steps = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        cfg.seed = seed;
        const auto x = models::simulate(cfg).regime();
        const auto r = residence_times(x);
        stays.insert(stays.end(), r.begin(), r.end());
        for (std::size_t t = 1; t < x.size(); ++t)
            crossings += (x[t] >= 0.5) != (x[t - 1] >= 0.5);
        steps += x.size() - 1;
    }
    REQUIRE(stays.size() > 500);
    double mean = 0.0;
    for (double s : stays)
        mean += s;
    mean /= static_cast<double>(stays.size());
    const double expected = 1.0 / cfg.delta;
    CHECK(mean > 0.7 * expected);
    CHECK(mean < 1.3 * expected);
    const double rate = static_cast<double>(crossings) / static_cast<double>(steps);
    // About 1500 expected crossings; 4 standard deviations is about 10%.
    CHECK(rate == doctest::Approx(cfg.delta).epsilon(0.1));
}

TEST_CASE("tent map preserves Lebesgue measure") {
    // One step applied to uniform samples stays uniform. (Long single
    // orbits are unsuitable: each step discards a mantissa bit.)
    const int bins = 20;
    std::vector<long> hist(bins, 0);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const long n = 1000000;
    for (long k = 0; k < n; ++k) {
        const double x = models::tent_map_step(u(rng), 0.1);
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        ++hist[static_cast<std::size_t>(std::min(bins - 1, static_cast<int>(x * bins)))];
    }
    const double expected = static_cast<double>(n) / bins;
    for (long h : hist)
        CHECK(std::abs(h - expected) / expected < 0.03);
}

TEST_CASE("model F' observation mixes both phases") {
    auto cfg = models::default_config(Kind::Fprime);
    cfg.seed = 5;
    cfg.theta2_0 = 0.3;
    const auto traj = models::simulate(cfg);
    for (std::size_t t = 0; t < traj.states.size(); t += 17) {
        const auto &s = traj.states[t];
        CHECK(s.theta == doctest::Approx(t * cfg.alpha1));
        CHECK(s.theta2 == doctest::Approx(0.3 + t * cfg.alpha2));
        const double w = models::switching_weight(s.x, cfg.c);
        CHECK(traj.observations[t] ==
              doctest::Approx(w * std::cos(s.theta) + (1 - w) * std::cos(s.theta2)));
    }
}

TEST_CASE("identical config and seed give identical trajectories") {
    for (Kind k : {Kind::M, Kind::A, Kind::F, Kind::Fprime}) {
        auto cfg = models::default_config(k);
        cfg.seed = 42;
        const auto a = models::simulate(cfg);
        const auto b = models::simulate(cfg);
        REQUIRE(a.observations.size() == b.observations.size());
        CHECK(std::memcmp(a.observations.data(), b.observations.data(),
                          a.observations.size() * sizeof(double)) == 0);
    }
    auto cfg = models::default_config(Kind::F);
    cfg.seed = 1;
    const double x1 = *models::simulate(cfg).config.x0;
    cfg.seed = 2;
    CHECK(*models::simulate(cfg).config.x0 != x1);
}

TEST_CASE("invalid model configurations are rejected") {
    auto f = models::default_config(Kind::F);
    f.delta = 1.5;
    CHECK_THROWS_AS(models::simulate(f), ValidationError);
    f = models::default_config(Kind::F);
    f.alpha2 = f.alpha1;
    CHECK_THROWS_AS(models::simulate(f), ValidationError);
    f = models::default_config(Kind::Fprime);
    f.x0 = 1.2;
    CHECK_THROWS_AS(models::simulate(f), ValidationError);
    auto m = models::default_config(Kind::M);
    m.n_steps = 0;
    CHECK_THROWS_AS(models::simulate(m), ValidationError);
}

TEST_CASE("kind and drift names") {
    CHECK(models::kind_from_string("F'") == Kind::Fprime);
    CHECK(models::kind_from_string(models::to_string(Kind::A)) == Kind::A);
    CHECK_THROWS_AS(models::kind_from_string("Z"), ValidationError);
    CHECK(models::drift_from_string("quadratic") == models::DriftLaw::quadratic);
    CHECK_THROWS_AS(models::drift_from_string("cubic"), ValidationError);
}

TEST_CASE("model config JSON round trip") {
    auto cfg = models::default_config(Kind::A);
    cfg.drift = models::DriftLaw::quadratic;
    cfg.base_amplitude = 1.5;
    cfg.seed = 9;
    const auto back = models::config_from_json(models::config_to_json(cfg));
    CHECK(back.kind == Kind::A);
    CHECK(back.drift == models::DriftLaw::quadratic);
    CHECK(back.base_amplitude == 1.5);
    CHECK(back.seed == 9);

    const auto custom = models::config_from_json(
        {{"kind", "M"}, {"drift_coefficients", {0.0, 0.001}}});
    CHECK(custom.drift == models::DriftLaw::custom);
    CHECK(custom.d1 == 0.001);
    CHECK_THROWS_AS(models::config_from_json({{"kind", "M"}, {"n_steps", "many"}}),
                    ValidationError);
}

TEST_CASE("trajectory export writes series and sidecar") {
    const auto dir = testing::scratch_dir("models_export");
    auto cfg = models::default_config(Kind::F);
    cfg.seed = 7;
    const auto traj = models::simulate(cfg);
    const auto files = models::write_trajectory(traj, dir);
    REQUIRE(files.size() == 2);
    for (const auto &f : files)
        CHECK(std::filesystem::is_regular_file(f));
    std::ifstream in(dir / "trajectory.json");
    const auto meta = nlohmann::json::parse(in);
    CHECK(meta["length"] == 2000);
    CHECK(meta["model"]["kind"] == "F");
    CHECK(meta["model"].contains("x0"));
    // Re-simulating from the sidecar reproduces the series exactly.
    const auto again = models::simulate(models::config_from_json(meta["model"]));
    CHECK(again.observations == traj.observations);
}
