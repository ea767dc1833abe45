#pragma once

// Independent numerical oracle for the closed-form inner products: adaptive
// Gauss-Kronrod on [0, L] plus an explicit bound on the neglected tail.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "extlab/exppoly.hpp"
#include "extlab/hilbert.hpp"

namespace extlab::oracle {

struct QuadratureResult {
    Complex value;
    double cutoff;      // integration ran over [0, cutoff]
    double tail_bound;  // |integral over [cutoff, inf)| <= tail_bound
};

namespace detail {

/// Bound on int_L^inf sum |c| x^m e^{-s x} dx for the product terms, using
/// int_L^inf x^m e^{-s x} <= 2 L^m e^{-s L} / s once L >= 2 m / s.
inline double tail_bound(const ExpPoly& p, const ExpPoly& q, double cutoff) {
    double b = 0.0;
    for (const auto& a : p.terms())
        for (const auto& t : q.terms()) {
            const double s = a.rate.real() + t.rate.real();
            const unsigned m = a.power + t.power;
            if (cutoff < 2.0 * m / s) return std::numeric_limits<double>::infinity();
            b += std::abs(a.coeff) * std::abs(t.coeff) * 2.0 * std::pow(cutoff, m) * std::exp(-s * cutoff) / s;
        }
    return b;
}

}  // namespace detail

/// <p, q> by adaptive quadrature. The cutoff starts at 40 and doubles until
/// the analytic tail bound is below `tail_target`.
inline QuadratureResult quadrature_inner_product(const ExpPoly& p, const ExpPoly& q, double tail_target = 1e-13) {
    double cutoff = 40.0;
    while (detail::tail_bound(p, q, cutoff) > tail_target && cutoff < 1e4) cutoff *= 2.0;

    auto integrand = [&](double x) { return std::conj(p(x)) * q(x); };
    using boost::math::quadrature::gauss_kronrod;
    // Split the range so each panel sees only a few e-folds of decay.
    double re = 0.0;
    double im = 0.0;
    const double panel = 2.5;
    for (double lo = 0.0; lo < cutoff; lo += panel) {
        const double hi = std::min(lo + panel, cutoff);
        re += gauss_kronrod<double, 61>::integrate([&](double x) { return integrand(x).real(); }, lo, hi, 8, 1e-13);
        im += gauss_kronrod<double, 61>::integrate([&](double x) { return integrand(x).imag(); }, lo, hi, 8, 1e-13);
    }
    return {Complex(re, im), cutoff, detail::tail_bound(p, q, cutoff)};
}

}  // namespace extlab::oracle

namespace extlab {

/// ||h|| from point values. The closed-form norm sums squared coefficients
/// and loses everything to cancellation when h is a small difference of
/// large terms with nearby rates (the 1/eps-sized deficiency components);
/// pointwise evaluation keeps the absolute error near machine precision
/// times the coefficient size.
inline double quadrature_norm(const HilbertElement& h, double tail_target = 1e-30) {
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    for (const auto& p : h.channels()) {
        if (p.is_zero()) continue;
        double cutoff = 40.0;
        while (oracle::detail::tail_bound(p, p, cutoff) > tail_target && cutoff < 1e4) cutoff *= 2.0;
        // Fixed 61-point rule on short panels: the integrand is analytic with
        // unit-scale decay, and an adaptive rule would chase the rounding
        // noise of tiny differences.
        const double panel = 2.0;
        for (double lo = 0.0; lo < cutoff; lo += panel) {
            const double hi = std::min(lo + panel, cutoff);
            total += gauss_kronrod<double, 61>::integrate([&](double x) { return std::norm(p(x)); }, lo, hi, 0);
        }
    }
    return std::sqrt(total);
}

}  // namespace extlab
