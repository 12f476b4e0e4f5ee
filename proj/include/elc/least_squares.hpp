#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "elc/error.hpp"

namespace elc {

/// y = a u^2 + b u + c, with the residual sum of squares of the fit.
template <typename Scalar>
struct QuadraticFit {
    Eigen::Matrix<Scalar, 3, 1> coeffs = Eigen::Matrix<Scalar, 3, 1>::Zero();  // (a, b, c)
    Scalar sse = Scalar(0);
    int n = 0;

    [[nodiscard]] Scalar a() const { return coeffs(0); }
    [[nodiscard]] Scalar b() const { return coeffs(1); }
    [[nodiscard]] Scalar c() const { return coeffs(2); }
    [[nodiscard]] Scalar operator()(Scalar u) const { return (coeffs(0) * u + coeffs(1)) * u + coeffs(2); }
};

template <typename Scalar>
struct LineFit {
    Scalar slope = Scalar(0);
    Scalar intercept = Scalar(0);

    [[nodiscard]] Scalar operator()(Scalar u) const { return slope * u + intercept; }
};

namespace detail {

template <typename Derived>
int count_distinct(const Eigen::MatrixBase<Derived>& u) {
    std::vector<typename Derived::Scalar> v(u.derived().data(), u.derived().data() + u.size());
    std::sort(v.begin(), v.end());
    return static_cast<int>(std::unique(v.begin(), v.end()) - v.begin());
}

}  // namespace detail

/// Least-squares quadratic through (u_i, y_i).
///
/// The abscissa is centered on its mean and scaled to [-1, 1] before the
/// 3x3 normal equations are formed; coefficients are mapped back afterwards.
/// Throws Degenerate with fewer than 3 distinct abscissae or a singular system.
template <typename DerivedU, typename DerivedY>
QuadraticFit<typename DerivedU::Scalar> fit_quadratic(const Eigen::MatrixBase<DerivedU>& u,
                                                      const Eigen::MatrixBase<DerivedY>& y) {
    using Scalar = typename DerivedU::Scalar;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = u.size();
    if (y.size() != n) throw Error(ErrorCode::Degenerate, "abscissa and ordinate lengths differ");
    if (n < 3) throw Error(ErrorCode::Degenerate, "quadratic fit needs at least 3 points");
    const Vec uu = u;
    if (detail::count_distinct(uu) < 3) throw Error(ErrorCode::Degenerate, "fewer than 3 distinct abscissae");

    const Scalar mean = uu.mean();
    const Scalar scale = (uu.array() - mean).abs().maxCoeff();
    const Vec s = (uu.array() - mean) / scale;
    const Vec s2 = s.array().square();

    Eigen::Matrix<Scalar, 3, 3> normal;
    const Scalar m0 = static_cast<Scalar>(n);
    const Scalar m1 = s.sum();
    const Scalar m2 = s2.sum();
    const Scalar m3 = s2.dot(s);
    const Scalar m4 = s2.squaredNorm();
    normal << m4, m3, m2, m3, m2, m1, m2, m1, m0;
    const Eigen::Matrix<Scalar, 3, 1> rhs(s2.dot(y), s.dot(y), y.sum());

    const Eigen::LDLT<Eigen::Matrix<Scalar, 3, 3>> ldlt(normal);
    if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > Scalar(64) * std::numeric_limits<Scalar>::epsilon())) {
        throw Error(ErrorCode::Degenerate, "singular normal equations");
    }
    Eigen::Matrix<Scalar, 3, 1> scaled = ldlt.solve(rhs);
    auto residual = [&] { return Vec(y - (scaled(0) * s2 + scaled(1) * s + Vec::Constant(n, scaled(2)))); };
    // Refine against the data residual rather than the normal system, which
    // recovers the digits lost when clustered abscissae square the conditioning.
    Vec resid = residual();
    for (int it = 0; it < 2; ++it) {
        scaled += ldlt.solve(Eigen::Matrix<Scalar, 3, 1>(s2.dot(resid), s.dot(resid), resid.sum()));
        resid = residual();
    }

    QuadraticFit<Scalar> fit;
    const Scalar k2 = scale * scale;
    fit.coeffs(0) = scaled(0) / k2;
    fit.coeffs(1) = scaled(1) / scale - Scalar(2) * scaled(0) * mean / k2;
    fit.coeffs(2) = scaled(2) - scaled(1) * mean / scale + scaled(0) * mean * mean / k2;
    fit.sse = resid.squaredNorm();
    fit.n = static_cast<int>(n);
    return fit;
}

/// Least-squares straight line. Throws Degenerate with fewer than 2 distinct abscissae.
template <typename DerivedU, typename DerivedY>
LineFit<typename DerivedU::Scalar> fit_line(const Eigen::MatrixBase<DerivedU>& u,
                                            const Eigen::MatrixBase<DerivedY>& y) {
    using Scalar = typename DerivedU::Scalar;
    const Eigen::Index n = u.size();
    if (n < 2 || y.size() != n) throw Error(ErrorCode::Degenerate, "line fit needs at least 2 points");
    const Scalar mu = u.mean();
    const Scalar my = y.mean();
    const auto du = (u.array() - mu).matrix();
    const Scalar sxx = du.squaredNorm();
    if (!(sxx > Scalar(0))) throw Error(ErrorCode::Degenerate, "line fit needs 2 distinct abscissae");
    LineFit<Scalar> fit;
    fit.slope = du.dot((y.array() - my).matrix()) / sxx;
    fit.intercept = my - fit.slope * mu;
    return fit;
}

}  // namespace elc
