#include "trendop/spectral.hpp"

#include "trendop/error.hpp"
#include "trendop/io.hpp"

#include <cmath>
#include <numbers>

namespace trendop::spectral {

double eigenperiod(cplx lambda, int s, double dt) {
    const double angle = std::abs(std::arg(lambda));
    if (!(angle > op::real_tolerance))
        throw ValidationError("eigenperiod: eigenvalue " +
                              io::format_double(lambda.real()) + (lambda.imag() < 0 ? "" : "+") +
                              io::format_double(lambda.imag()) +
                              "i is real; its period is undefined (infinite)");
    return 2.0 * std::numbers::pi * s * dt / angle;
}

double period_or_infinity(cplx lambda, int s, double dt) {
    if (std::abs(std::arg(lambda)) > op::real_tolerance)
        return eigenperiod(lambda, s, dt);
    return std::numeric_limits<double>::infinity();
}

const char *to_string(ModeKind kind) {
    switch (kind) {
    case ModeKind::constant: return "constant";
    case ModeKind::trend: return "trend";
    case ModeKind::oscillatory: return "oscillatory";
    }
    return "?";
}

std::vector<ModeReport> classify_modes(const SpectralDecomposition &dec,
                                       const TimeSeries &observations) {
    if (observations.length() != dec.right.rows())
        throw ValidationError("classify_modes: observations have " +
                              std::to_string(observations.length()) +
                              " samples but eigenvectors have " +
                              std::to_string(dec.right.rows()));
    const Eigen::MatrixXcd Y = observations.samples.cast<cplx>();
    std::vector<ModeReport> out;
    for (int j = 0; j < dec.size(); ++j) {
        const cplx lambda = dec.eigenvalues[j];
        if (lambda.imag() < 0.0 && !dec.is_real(j))
            continue; // reported through its partner
        ModeReport r;
        r.index = j;
        r.eigenvalue = lambda;
        if (dec.is_real(j) || std::abs(lambda.imag()) <= op::real_tolerance) {
            r.kind = (j == 0 && std::abs(lambda - 1.0) < 1e-10) ? ModeKind::constant
                                                                : ModeKind::trend;
        } else {
            r.kind = ModeKind::oscillatory;
            r.period = eigenperiod(lambda, dec.s, dec.dt);
        }
        r.amplitude = (dec.dual.col(j).adjoint() * Y).norm();
        r.time_series = dec.right.col(j).real();
        out.push_back(std::move(r));
    }
    return out;
}

std::optional<int> trend_mode(const SpectralDecomposition &dec) {
    for (int j = 1; j < dec.size(); ++j)
        if (dec.is_real(j) || std::abs(dec.eigenvalues[j].imag()) <= op::real_tolerance)
            return j;
    return std::nullopt;
}

std::vector<int> close_under_conjugation(const SpectralDecomposition &dec,
                                         std::set<int> &indices) {
    std::vector<int> added;
    for (int j : std::set<int>(indices)) {
        if (j < 0 || j >= dec.size())
            throw ValidationError("mode index " + std::to_string(j + 1) +
                                  " out of range 1.." + std::to_string(dec.size()));
        const int p = dec.partner[static_cast<std::size_t>(j)];
        if (p >= 0 && indices.insert(p).second)
            added.push_back(p);
    }
    return added;
}

Projection project(const SpectralDecomposition &dec, const std::set<int> &indices,
                   const Eigen::MatrixXd &target) {
    if (target.rows() != dec.right.rows())
        throw ValidationError("project: target has " + std::to_string(target.rows()) +
                              " samples but eigenvectors have " +
                              std::to_string(dec.right.rows()));
    if (indices.empty())
        throw ValidationError("project: empty mode index set");
    Projection p;
    p.values = Eigen::MatrixXcd::Zero(target.rows(), target.cols());
    Eigen::MatrixXcd Y = target.cast<cplx>();
    bool closed = true;
    for (int j : indices) {
        if (j < 0 || j >= dec.size())
            throw ValidationError("project: mode index " + std::to_string(j + 1) +
                                  " out of range 1.." + std::to_string(dec.size()));
        const int partner = dec.partner[static_cast<std::size_t>(j)];
        if (partner >= 0 && !indices.contains(partner))
            closed = false;
        const Eigen::RowVectorXcd coef = dec.dual.col(j).adjoint() * Y;
        p.values.noalias() += dec.right.col(j) * coef;
        p.indices.push_back(j);
    }
    p.real = closed;
    p.max_imag = p.values.size() ? p.values.imag().cwiseAbs().maxCoeff() : 0.0;
    return p;
}

AffineFit affine_scale(const Eigen::VectorXd &mode, const Eigen::VectorXd &reference) {
    if (mode.size() != reference.size() || mode.size() == 0)
        throw ValidationError("affine_scale: series lengths differ or are empty");
    const double mm = mode.mean();
    const double rm = reference.mean();
    const Eigen::VectorXd mc = mode.array() - mm;
    const double var = mc.squaredNorm();
    if (!(var > 1e-24 * std::max(1.0, mode.squaredNorm())))
        throw ValidationError("affine_scale: mode series has zero variance");
    AffineFit fit;
    fit.gain = mc.dot((reference.array() - rm).matrix()) / var;
    fit.offset = rm - fit.gain * mm;
    fit.scaled = (fit.gain * mode.array() + fit.offset).matrix();
    return fit;
}

double regime_localization(const Eigen::VectorXcd &mode, const std::vector<bool> &mask) {
    if (static_cast<Eigen::Index>(mask.size()) != mode.size())
        throw ValidationError("regime_localization: mask length differs from mode length");
    double in = 0.0, out = 0.0;
    std::size_t n_in = 0, n_out = 0;
    for (Eigen::Index k = 0; k < mode.size(); ++k) {
        const double a2 = std::norm(mode[k]);
        if (mask[static_cast<std::size_t>(k)]) {
            in += a2;
            ++n_in;
        } else {
            out += a2;
            ++n_out;
        }
    }
    if (n_in == 0 || n_out == 0)
        throw ValidationError("regime_localization: mask selects " +
                              std::string(n_in == 0 ? "no" : "every") + " sample");
    const double rms_in = std::sqrt(in / static_cast<double>(n_in));
    const double rms_out = std::sqrt(out / static_cast<double>(n_out));
    if (rms_out == 0.0) {
        if (rms_in == 0.0)
            throw ValidationError("regime_localization: mode is identically zero");
        return std::numeric_limits<double>::infinity();
    }
    return rms_in / rms_out;
}

double pearson(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
    if (a.size() != b.size() || a.size() < 2)
        throw ValidationError("pearson: need two series of equal length >= 2");
    const Eigen::ArrayXd ac = a.array() - a.mean();
    const Eigen::ArrayXd bc = b.array() - b.mean();
    return (ac * bc).sum() / std::sqrt((ac * ac).sum() * (bc * bc).sum());
}

void write_mode_table(const std::vector<ModeReport> &modes,
                      const std::filesystem::path &path) {
    io::TableWriter w(path);
    w.header({"j", "re", "im", "period", "amplitude", "kind"});
    for (const auto &m : modes) {
        const double row[] = {static_cast<double>(m.index + 1), m.eigenvalue.real(),
                              m.eigenvalue.imag(), m.period, m.amplitude};
        w.row(row, to_string(m.kind));
    }
}

} // namespace trendop::spectral
