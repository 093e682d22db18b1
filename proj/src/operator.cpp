#include "trendop/operator.hpp"

#include "trendop/error.hpp"
#include "trendop/io.hpp"
#include "trendop/kernels.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace trendop::op {

Eigen::VectorXd knn_bandwidths(const embed::EmbeddedSeries &points, int K,
                               DuplicatePolicy duplicates) {
    const Eigen::Index n = points.size();
    if (K < 1)
        throw ValidationError("knn_bandwidths: K must be at least 1");
    if (K >= n)
        throw ValidationError("knn_bandwidths: K = " + std::to_string(K) +
                              " needs more than " + std::to_string(K) +
                              " embedded points, have " + std::to_string(n));
    if (duplicates == DuplicatePolicy::merge) {
        const double tol = 1e-12 * kernels::diameter(points.points);
        auto knn = kernels::knn_distances(points.points, K, tol * tol);
        for (Eigen::Index i = 0; i < n; ++i)
            if (std::isnan(knn.distance[i]))
                throw NumericalError("knn_bandwidths: point " + std::to_string(i) +
                                     " has fewer than " + std::to_string(K) +
                                     " distinct neighbours");
        return knn.distance;
    }
    auto knn = kernels::knn_distances(points.points, K);
    const double floor = 1e-12 * knn.diameter;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(knn.distance[i] > floor))
            throw NumericalError(
                "knn_bandwidths: point " + std::to_string(i) + " has " +
                std::to_string(K) + "-th neighbour distance " +
                io::format_double(knn.distance[i]) +
                " (duplicate points; raise K, remove repeated samples or merge "
                "duplicates)");
    }
    return knn.distance;
}

Eigen::MatrixXd kernel_matrix(const embed::EmbeddedSeries &points, int s,
                              const Eigen::VectorXd &bandwidths) {
    const Eigen::Index n = points.size();
    if (s < 0 || s >= n)
        throw ValidationError("kernel_matrix: step s = " + std::to_string(s) +
                              " must satisfy 0 <= s < N = " + std::to_string(n));
    if (bandwidths.size() != n)
        throw ValidationError("kernel_matrix: need one bandwidth per point");
    if (!(bandwidths.array() > 0.0).all())
        throw NumericalError("kernel_matrix: bandwidths must be positive");
    return kernels::variable_bandwidth_kernel(points.points, s, bandwidths);
}

MarkovOperator row_stochastic(Eigen::MatrixXd S) {
    if (S.rows() != S.cols() || S.rows() == 0)
        throw ValidationError("row_stochastic: S must be square and non-empty");
    if ((S.array() < 0.0).any())
        throw ValidationError("row_stochastic: S has negative entries");
    const Eigen::VectorXd sums = S.rowwise().sum();
    for (Eigen::Index i = 0; i < sums.size(); ++i)
        if (!(sums[i] > 0.0) || !std::isfinite(sums[i]))
            throw NumericalError("row_stochastic: row " + std::to_string(i) +
                                 " has sum " + io::format_double(sums[i]) +
                                 " (point isolated under the kernel)");
    MarkovOperator op;
    kernels::normalize_rows(S);
    op.P = std::move(S);
    return op;
}

MarkovOperator build_operator(const embed::EmbeddedSeries &points, int s, int K,
                              DuplicatePolicy duplicates) {
    Eigen::VectorXd bw = knn_bandwidths(points, K, duplicates);
    MarkovOperator op = row_stochastic(kernel_matrix(points, s, bw));
    op.s = s;
    op.K = K;
    op.dt = points.dt;
    op.bandwidths = std::move(bw);
    return op;
}

const char *to_string(DuplicatePolicy p) {
    return p == DuplicatePolicy::merge ? "merge" : "error";
}

DuplicatePolicy duplicate_policy_from_string(const std::string &s) {
    if (s == "error") return DuplicatePolicy::error;
    if (s == "merge") return DuplicatePolicy::merge;
    throw ValidationError("unknown duplicate policy '" + s + "' (expected error or merge)");
}

namespace {

// One real eigenvalue or one conjugate pair from dgeev, in LAPACK order.
struct Unit {
    Eigen::Index col; // first column in VL/VR
    bool pair;
    double re, im, modulus;
};

Eigen::VectorXcd column(const std::vector<double> &v, Eigen::Index n,
                        Eigen::Index col, bool pair) {
    Eigen::Map<const Eigen::VectorXd> a(v.data() + col * n, n);
    if (!pair)
        return a.cast<cplx>();
    Eigen::Map<const Eigen::VectorXd> b(v.data() + (col + 1) * n, n);
    Eigen::VectorXcd out(n);
    out.real() = a;
    out.imag() = b;
    return out;
}

// Unit 2-norm, largest-modulus entry real and positive.
void fix_phase(Eigen::VectorXcd &v) {
    Eigen::Index idx = 0;
    double best = -1.0;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double a = std::abs(v[k]);
        if (a > best) {
            best = a;
            idx = k;
        }
    }
    const cplx phase = v[idx] / std::abs(v[idx]);
    v /= phase;
    v[idx] = cplx(v[idx].real(), 0.0);
    v.normalize();
}

} // namespace

SpectralDecomposition eigendecompose(const MarkovOperator &op, int m) {
    const Eigen::Index n = op.P.rows();
    if (m < 1 || m > n)
        throw ValidationError("eigendecompose: requested " + std::to_string(m) +
                              " modes from an operator of size " +
                              std::to_string(n));

    std::vector<double> a(op.P.data(), op.P.data() + n * n);
    std::vector<double> wr(static_cast<std::size_t>(n)), wi(static_cast<std::size_t>(n));
    std::vector<double> vl(static_cast<std::size_t>(n * n)), vr(static_cast<std::size_t>(n * n));
    const lapack_int info = LAPACKE_dgeev(
        LAPACK_COL_MAJOR, 'V', 'V', static_cast<lapack_int>(n), a.data(),
        static_cast<lapack_int>(n), wr.data(), wi.data(), vl.data(),
        static_cast<lapack_int>(n), vr.data(), static_cast<lapack_int>(n));
    if (info > 0)
        throw NumericalError("eigendecompose: QR iteration failed to converge; "
                             "only eigenvalues " + std::to_string(info + 1) +
                             ".." + std::to_string(n) + " converged");
    if (info < 0)
        throw NumericalError("eigendecompose: dgeev argument " +
                             std::to_string(-info) + " invalid");

    std::vector<Unit> units;
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (wi[sj] == 0.0) {
            units.push_back({j, false, wr[sj], 0.0, std::abs(wr[sj])});
        } else {
            units.push_back({j, true, wr[sj], std::abs(wi[sj]), std::hypot(wr[sj], wi[sj])});
            ++j;
        }
    }
    auto quantized = [](double x) { return std::round(x * 1e12); };
    std::stable_sort(units.begin(), units.end(), [&](const Unit &x, const Unit &y) {
        const double qx = quantized(x.modulus), qy = quantized(y.modulus);
        if (qx != qy)
            return qx > qy;
        return x.re > y.re;
    });

    std::vector<Unit> kept;
    int count = 0;
    for (const Unit &u : units) {
        if (count >= m)
            break;
        kept.push_back(u);
        count += u.pair ? 2 : 1;
    }

    SpectralDecomposition dec;
    dec.s = op.s;
    dec.dt = op.dt;
    dec.eigenvalues.resize(count);
    dec.right.resize(n, count);
    dec.dual.resize(n, count);
    dec.partner.assign(static_cast<std::size_t>(count), -1);

    int j = 0;
    for (const Unit &u : kept) {
        Eigen::VectorXcd v = column(vr, n, u.col, u.pair);
        Eigen::VectorXcd w = column(vl, n, u.col, u.pair);
        // LAPACK lists the positive-imaginary member of a pair first.
        const cplx lambda(u.re, u.pair ? wi[static_cast<std::size_t>(u.col)] : 0.0);
        fix_phase(v);
        w.normalize();
        const cplx c = w.dot(v); // w^H v
        dec.condition.push_back(1.0 / std::abs(c));
        w /= std::conj(c);
        dec.eigenvalues[j] = lambda;
        dec.right.col(j) = v;
        dec.dual.col(j) = w;
        if (u.pair) {
            dec.eigenvalues[j + 1] = std::conj(lambda);
            dec.right.col(j + 1) = v.conjugate();
            dec.dual.col(j + 1) = w.conjugate();
            dec.condition.push_back(dec.condition.back());
            dec.partner[static_cast<std::size_t>(j)] = j + 1;
            dec.partner[static_cast<std::size_t>(j) + 1] = j;
            j += 2;
        } else {
            j += 1;
        }
    }

    // Residuals with real products so P is never copied to complex storage.
    const Eigen::MatrixXd &P = op.P;
    Eigen::MatrixXcd PV(n, count), PtW(n, count);
    PV.real() = P * dec.right.real();
    PV.imag() = P * dec.right.imag();
    PtW.real() = P.transpose() * dec.dual.real();
    PtW.imag() = P.transpose() * dec.dual.imag();
    double worst = 0.0;
    for (int k = 0; k < count; ++k) {
        const cplx lam = dec.eigenvalues[k];
        const double r = (PV.col(k) - lam * dec.right.col(k)).norm() /
                         dec.right.col(k).norm();
        const double rd = (PtW.col(k) - std::conj(lam) * dec.dual.col(k)).norm() /
                          dec.dual.col(k).norm();
        dec.residuals.push_back(r);
        dec.dual_residuals.push_back(rd);
        worst = std::max({worst, r, rd});
    }

    dec.flagged.assign(static_cast<std::size_t>(count), false);
    for (int k = 0; k < count; ++k) {
        bool flag = dec.condition[static_cast<std::size_t>(k)] > 1e8;
        for (int l = 0; l < count && !flag; ++l)
            if (l != k && std::abs(dec.eigenvalues[k] - dec.eigenvalues[l]) <
                              1e-8 * std::max(1.0, std::abs(dec.eigenvalues[k])))
                flag = true;
        dec.flagged[static_cast<std::size_t>(k)] = flag;
    }

    if (worst > 1e-6) {
        std::ostringstream msg;
        msg << "eigendecompose: eigenpair residuals too large (worst "
            << io::format_double(worst) << "); residuals:";
        for (int k = 0; k < count; ++k)
            msg << ' ' << io::format_double(dec.residuals[static_cast<std::size_t>(k)]);
        throw NumericalError(msg.str());
    }
    return dec;
}

void write_eigenvalues(const SpectralDecomposition &dec,
                       const std::filesystem::path &path) {
    io::TableWriter w(path);
    w.meta("step", std::to_string(dec.s));
    w.meta("dt", dec.dt);
    w.header({"index", "re", "im", "modulus", "arg", "residual"});
    for (int k = 0; k < dec.size(); ++k) {
        const cplx l = dec.eigenvalues[k];
        w.row({static_cast<double>(k + 1), l.real(), l.imag(), std::abs(l),
               std::arg(l), dec.residuals[static_cast<std::size_t>(k)]});
    }
}

void write_matrix(const Eigen::MatrixXd &m, const std::filesystem::path &path) {
    io::TableWriter w(path);
    w.meta("rows", std::to_string(m.rows()));
    w.meta("cols", std::to_string(m.cols()));
    std::vector<std::string> cols;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        cols.push_back("c" + std::to_string(j + 1));
    w.header(cols);
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row[static_cast<std::size_t>(j)] = m(i, j);
        w.row(row);
    }
}

} // namespace trendop::op
