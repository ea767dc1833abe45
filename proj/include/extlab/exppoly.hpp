#pragma once

// Exact algebra of exponential polynomials f(x) = sum_k c_k x^{m_k} e^{-l_k x}
// on the half-line, Re l_k > 0. Every such function lies in H^2(R+) with all
// derivatives, so the class is closed under the Schrodinger action
// -d^2/dx^2 + 1 and under the decaying resolvent solves used below.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "extlab/errors.hpp"
#include "extlab/linalg.hpp"

namespace extlab {

namespace tol {
/// Rates closer than this (relative to 1 + |rate|) are merged / treated as resonant.
inline constexpr double rate = 1e-8;
/// Coefficients below this fraction of the operands' largest coefficient are dropped.
inline constexpr double coeff = 1e-12;
/// Boundary-trace tolerance for range and membership decisions.
inline constexpr double trace = 1e-9;
}  // namespace tol

struct ExpPolyTerm {
    Complex coeff;
    unsigned power = 0;
    Complex rate;

    friend bool operator==(const ExpPolyTerm&, const ExpPolyTerm&) = default;
};

inline bool rates_close(Complex a, Complex b) {
    return std::abs(a - b) <= tol::rate * (1.0 + std::abs(a));
}

class ExpPoly {
public:
    ExpPoly() = default;

    /// Single term c x^m e^{-rate x}; throws InvalidArgument unless Re rate > 0.
    static ExpPoly term(Complex coeff, unsigned power, Complex rate) {
        return from_terms({ExpPolyTerm{coeff, power, rate}});
    }
    static ExpPoly exp(Complex rate) { return term(1.0, 0, rate); }

    /// Canonicalizes an arbitrary term list. `scale` is the magnitude the
    /// drop tolerance is relative to; by default the largest input coefficient.
    static ExpPoly from_terms(std::vector<ExpPolyTerm> terms, double scale = -1.0) {
        for (const auto& t : terms) {
            if (!(t.rate.real() > 0.0)) {
                throw InvalidArgument("exponential rate must have positive real part, got (" +
                                      std::to_string(t.rate.real()) + ", " +
                                      std::to_string(t.rate.imag()) + ")");
            }
        }
        if (scale < 0.0) {
            scale = 0.0;
            for (const auto& t : terms) scale = std::max(scale, std::abs(t.coeff));
        }
        std::vector<ExpPolyTerm> merged;
        merged.reserve(terms.size());
        for (const auto& t : terms) {
            auto it = std::find_if(merged.begin(), merged.end(), [&](const ExpPolyTerm& m) {
                return m.power == t.power && rates_close(m.rate, t.rate);
            });
            if (it == merged.end()) {
                merged.push_back(t);
            } else {
                it->coeff += t.coeff;
            }
        }
        const double cutoff = tol::coeff * scale;
        std::erase_if(merged, [&](const ExpPolyTerm& t) { return std::abs(t.coeff) <= cutoff; });
        std::sort(merged.begin(), merged.end(), [](const ExpPolyTerm& a, const ExpPolyTerm& b) {
            if (a.rate.real() != b.rate.real()) return a.rate.real() < b.rate.real();
            if (a.rate.imag() != b.rate.imag()) return a.rate.imag() < b.rate.imag();
            return a.power < b.power;
        });
        ExpPoly p;
        p.terms_ = std::move(merged);
        return p;
    }

    const std::vector<ExpPolyTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    double max_coeff() const {
        double m = 0.0;
        for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
        return m;
    }

    Complex operator()(double x) const {
        Complex s{};
        for (const auto& t : terms_) s += t.coeff * std::pow(x, static_cast<double>(t.power)) * std::exp(-t.rate * x);
        return s;
    }

    friend ExpPoly operator+(const ExpPoly& p, const ExpPoly& q) {
        std::vector<ExpPolyTerm> all = p.terms_;
        all.insert(all.end(), q.terms_.begin(), q.terms_.end());
        return from_terms(std::move(all), std::max(p.max_coeff(), q.max_coeff()));
    }
    friend ExpPoly operator-(const ExpPoly& p) {
        ExpPoly r = p;
        for (auto& t : r.terms_) t.coeff = -t.coeff;
        return r;
    }
    friend ExpPoly operator-(const ExpPoly& p, const ExpPoly& q) { return p + (-q); }
    friend ExpPoly operator*(Complex s, const ExpPoly& p) {
        if (s == Complex{}) return {};
        ExpPoly r = p;
        for (auto& t : r.terms_) t.coeff *= s;
        return r;
    }
    ExpPoly& operator+=(const ExpPoly& q) { return *this = *this + q; }
    ExpPoly& operator-=(const ExpPoly& q) { return *this = *this - q; }

    friend bool operator==(const ExpPoly&, const ExpPoly&) = default;

private:
    std::vector<ExpPolyTerm> terms_;
};

inline ExpPoly scale(Complex c, const ExpPoly& p) { return c * p; }
inline ExpPoly add(const ExpPoly& p, const ExpPoly& q) { return p + q; }

/// Pointwise complex conjugate: coefficients and rates conjugated.
inline ExpPoly conjugate(const ExpPoly& p) {
    std::vector<ExpPolyTerm> terms;
    for (const auto& t : p.terms()) terms.push_back({std::conj(t.coeff), t.power, std::conj(t.rate)});
    return ExpPoly::from_terms(std::move(terms));
}

inline ExpPoly differentiate(const ExpPoly& p) {
    std::vector<ExpPolyTerm> terms;
    double scale = 0.0;
    for (const auto& t : p.terms()) {
        if (t.power > 0) terms.push_back({t.coeff * static_cast<double>(t.power), t.power - 1, t.rate});
        terms.push_back({-t.coeff * t.rate, t.power, t.rate});
        scale = std::max(scale, std::abs(t.coeff) * std::max<double>(t.power, std::abs(t.rate)));
    }
    return ExpPoly::from_terms(std::move(terms), scale);
}

struct BoundaryValues {
    Complex value;
    Complex derivative;
};

/// (p(0), p'(0)), read off the power-0 and power-1 coefficients.
inline BoundaryValues boundary_values(const ExpPoly& p) {
    BoundaryValues b{};
    for (const auto& t : p.terms()) {
        if (t.power == 0) {
            b.value += t.coeff;
            b.derivative -= t.coeff * t.rate;
        } else if (t.power == 1) {
            b.derivative += t.coeff;
        }
    }
    return b;
}

namespace detail {
inline double factorial(unsigned n) {
    double f = 1.0;
    for (unsigned k = 2; k <= n; ++k) f *= k;
    return f;
}
inline Complex ipow(Complex base, unsigned n) {
    Complex r = 1.0;
    for (unsigned k = 0; k < n; ++k) r *= base;
    return r;
}
}  // namespace detail

/// L^2(R+) inner product, anti-linear in the first slot:
/// <p, q> = sum conj(c_j) d_k (m_j + n_k)! / (conj(l_j) + mu_k)^{m_j + n_k + 1}.
inline Complex inner_product(const ExpPoly& p, const ExpPoly& q) {
    Complex s{};
    for (const auto& a : p.terms()) {
        for (const auto& b : q.terms()) {
            const unsigned n = a.power + b.power;
            s += std::conj(a.coeff) * b.coeff * detail::factorial(n) /
                 detail::ipow(std::conj(a.rate) + b.rate, n + 1);
        }
    }
    return s;
}

inline double norm(const ExpPoly& p) { return std::sqrt(std::max(inner_product(p, p).real(), 0.0)); }

/// (S* - z)p = -p'' + (1 - z) p.
/// (1 - z) - l^2, the symbol of -d^2/dx^2 + 1 - z on e^{-l x}. Evaluated with
/// fused multiply-adds: for l close to sqrt(1 - z) the plain expression
/// cancels down to rounding noise of order 1e-16, while the true value is
/// what the rest of the calculus divides by.
inline Complex shifted_symbol(Complex l, Complex z) {
    const double re = std::fma(-l.real(), l.real(), 1.0 - z.real()) + l.imag() * l.imag();
    const double im = std::fma(-2.0 * l.real(), l.imag(), -z.imag());
    return {re, im};
}

/// -p'' + (1 - z) p, term by term.
inline ExpPoly apply_shifted(const ExpPoly& p, Complex z) {
    std::vector<ExpPolyTerm> terms;
    double scale = 0.0;
    for (const auto& t : p.terms()) {
        const double m = t.power;
        terms.push_back({t.coeff * shifted_symbol(t.rate, z), t.power, t.rate});
        if (t.power >= 1) terms.push_back({2.0 * m * t.rate * t.coeff, t.power - 1, t.rate});
        if (t.power >= 2) terms.push_back({-m * (m - 1.0) * t.coeff, t.power - 2, t.rate});
        const double r = std::abs(t.rate);
        scale = std::max(scale, std::abs(t.coeff) * std::max({1.0 + std::abs(z), r * r, m * r, m * m}));
    }
    return ExpPoly::from_terms(std::move(terms), scale);
}

enum class BoundaryCondition { Dirichlet, DoubleZero };

/// Principal square root sqrt(1 - z): the decay rate of ker(S* - z).
inline Complex decay_rate(Complex z) {
    const Complex k = std::sqrt(1.0 - z);
    if (!(k.real() > 0.0)) throw InvalidArgument("sqrt(1 - z) has no positive real part");
    return k;
}

inline bool is_accepted_resolvent_point(Complex z) {
    if (z == Complex{}) return true;
    const double e = std::abs(z.imag());
    return z.real() == 0.0 && e > 0.0 && e <= 0.5;
}

/// Solves -u'' + (1 - z) u = f for a decaying u with u(0) = 0 (Dirichlet), or
/// additionally u'(0) = 0 (DoubleZero, z = 0 only), which exists iff f is
/// orthogonal to e^{-x}; otherwise NotInRange.
inline ExpPoly solve_resolvent(const ExpPoly& f, Complex z, BoundaryCondition bc) {
    if (!is_accepted_resolvent_point(z)) {
        throw InvalidArgument("resolvent point must be 0 or +-i*eps with 0 < eps <= 0.5");
    }
    if (bc == BoundaryCondition::DoubleZero && z != Complex{}) {
        throw InvalidArgument("the closure is only inverted at z = 0");
    }
    const Complex k = decay_rate(z);

    // Group the right-hand side by rate; each group is P(x) e^{-l x}.
    struct Group {
        Complex rate;
        std::vector<Complex> poly;
    };
    std::vector<Group> groups;
    for (const auto& t : f.terms()) {
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const Group& g) { return rates_close(g.rate, t.rate); });
        if (it == groups.end()) {
            groups.push_back({t.rate, {}});
            it = std::prev(groups.end());
        }
        if (it->poly.size() <= t.power) it->poly.resize(t.power + 1);
        it->poly[t.power] += t.coeff;
    }

    std::vector<ExpPolyTerm> u_terms;
    for (const auto& g : groups) {
        const std::size_t n = g.poly.size() - 1;
        if (rates_close(g.rate, k)) {
            // Resonant: Q has degree n + 1 and Q(0) is absorbed by the homogeneous part.
            std::vector<Complex> q(n + 3, Complex{});
            for (std::size_t m = n + 1; m-- > 0;) {
                q[m + 1] = (g.poly[m] + static_cast<double>((m + 2) * (m + 1)) * q[m + 2]) /
                           (2.0 * k * static_cast<double>(m + 1));
            }
            for (std::size_t m = 1; m <= n + 1; ++m) u_terms.push_back({q[m], static_cast<unsigned>(m), k});
        } else {
            const Complex l = g.rate;
            const Complex a = shifted_symbol(l, z);
            std::vector<Complex> q(n + 3, Complex{});
            for (std::size_t m = n + 1; m-- > 0;) {
                q[m] = (g.poly[m] + static_cast<double>((m + 2) * (m + 1)) * q[m + 2] -
                        2.0 * l * static_cast<double>(m + 1) * q[m + 1]) / a;
            }
            for (std::size_t m = 0; m <= n; ++m) u_terms.push_back({q[m], static_cast<unsigned>(m), l});
        }
    }
    ExpPoly u = ExpPoly::from_terms(u_terms);
    const Complex u0 = boundary_values(u).value;
    if (u0 != Complex{}) u += ExpPoly::term(-u0, 0, k);

    if (bc == BoundaryCondition::DoubleZero) {
        const Complex d0 = boundary_values(u).derivative;
        if (std::abs(d0) > tol::trace * std::max(1.0, f.max_coeff())) {
            throw NotInRange("residual derivative trace " + std::to_string(std::abs(d0)) +
                             " after imposing u(0) = 0");
        }
    }
    return u;
}

// JSON: a list of {re_coeff, im_coeff, power, re_rate, im_rate} records.
inline void to_json(nlohmann::json& j, const ExpPoly& p) {
    j = nlohmann::json::array();
    for (const auto& t : p.terms()) {
        j.push_back({{"re_coeff", t.coeff.real()},
                     {"im_coeff", t.coeff.imag()},
                     {"power", t.power},
                     {"re_rate", t.rate.real()},
                     {"im_rate", t.rate.imag()}});
    }
}

inline void from_json(const nlohmann::json& j, ExpPoly& p) {
    std::vector<ExpPolyTerm> terms;
    for (const auto& r : j) {
        terms.push_back({Complex(r.at("re_coeff").get<double>(), r.at("im_coeff").get<double>()),
                         r.at("power").get<unsigned>(),
                         Complex(r.at("re_rate").get<double>(), r.at("im_rate").get<double>())});
    }
    p = ExpPoly::from_terms(std::move(terms));
}

}  // namespace extlab
