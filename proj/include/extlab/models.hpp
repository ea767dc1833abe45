#pragma once

// The two shipped operator models: S = -d^2/dx^2 + 1 on C_c^inf(R+), and the
// direct sum of two copies on R- and R+. Both satisfy m(S) = 1, so 0 lies in
// the resolvent set of the closure and the Friedrichs extension plays the
// role of the distinguished extension S_D.

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "extlab/errors.hpp"
#include "extlab/exppoly.hpp"
#include "extlab/hilbert.hpp"
#include "extlab/linalg.hpp"

namespace extlab {

/// Boundary data of an element of D(S*), laid out per channel as
/// (value, derivative) in physical (unreflected) orientation.
using TraceVector = std::vector<Complex>;

/// What the extension calculus needs to know about a symmetric operator S
/// with 0 in the resolvent set of its closure and finite deficiency index.
template <class M>
concept SymmetricModel = requires(const M& m, const HilbertElement& g, Complex z, const TraceVector& t) {
    { m.name() } -> std::convertible_to<std::string_view>;
    { m.channel_count() } -> std::convertible_to<std::size_t>;
    { m.deficiency_index() } -> std::convertible_to<std::size_t>;
    { m.lower_bound() } -> std::convertible_to<double>;
    { m.closure_inverse_bound() } -> std::convertible_to<double>;
    { m.distinguished_inverse_bound() } -> std::convertible_to<double>;
    { m.apply_adjoint(g) } -> std::same_as<HilbertElement>;
    { m.apply_shifted(g, z) } -> std::same_as<HilbertElement>;
    { m.deficiency_basis(z) } -> std::same_as<std::vector<HilbertElement>>;
    { m.distinguished_resolvent(g) } -> std::same_as<HilbertElement>;
    { m.closure_solve(g) } -> std::same_as<HilbertElement>;
    { m.closure_membership(g) } -> std::same_as<bool>;
    { m.boundary_trace(g) } -> std::same_as<TraceVector>;
    { m.lift_trace(t) } -> std::same_as<HilbertElement>;
};

/// -d^2/dx^2 + 1 acting channel-wise on `Channels` half-lines. For two
/// channels, channel 0 is the left half-line stored reflected: the stored
/// function is g(-x), so g_-(0) equals the stored value and g_-'(0) is
/// minus the stored derivative.
template <std::size_t Channels>
class LaplacianModel {
    static_assert(Channels == 1 || Channels == 2);

public:
    std::string_view name() const { return Channels == 1 ? "halfline" : "twohalflines"; }
    std::size_t channel_count() const { return Channels; }
    std::size_t deficiency_index() const { return Channels; }
    double lower_bound() const { return 1.0; }
    /// ||closure^{-1}|| <= 1 / m(S).
    double closure_inverse_bound() const { return 1.0 / lower_bound(); }
    /// ||S_F^{-1}|| = 1 / m(S_F) = 1 / m(S).
    double distinguished_inverse_bound() const { return 1.0 / lower_bound(); }
    static constexpr bool reflected(std::size_t c) { return Channels == 2 && c == 0; }

    HilbertElement apply_adjoint(const HilbertElement& g) const { return apply_shifted(g, 0.0); }

    HilbertElement apply_shifted(const HilbertElement& g, Complex z) const {
        check(g);
        return g.map([z](const ExpPoly& p) { return extlab::apply_shifted(p, z); });
    }

    /// Orthonormal basis of ker(S* - z): one normalized sqrt(2 Re k) e^{-k x}
    /// per channel, k = sqrt(1 - z). For z = i eps, sqrt(2 Re k) = sqrt(2) kappa_eps.
    std::vector<HilbertElement> deficiency_basis(Complex z) const {
        const Complex k = decay_rate(z);
        const ExpPoly e = ExpPoly::term(std::sqrt(2.0 * k.real()), 0, k);
        std::vector<HilbertElement> basis;
        for (std::size_t c = 0; c < Channels; ++c) basis.push_back(HilbertElement::on_channel(Channels, c, e));
        return basis;
    }

    /// S_F^{-1}: Dirichlet resolvent at 0 on every channel.
    HilbertElement distinguished_resolvent(const HilbertElement& f) const {
        check(f);
        return f.map([](const ExpPoly& p) { return solve_resolvent(p, 0.0, BoundaryCondition::Dirichlet); });
    }

    /// closure^{-1} on ran(closure); NotInRange when f has a ker S* component.
    HilbertElement closure_solve(const HilbertElement& f) const {
        check(f);
        return f.map([](const ExpPoly& p) { return solve_resolvent(p, 0.0, BoundaryCondition::DoubleZero); });
    }

    /// Both traces vanish on every channel, to trace_tol times `scale`.
    bool closure_membership(const HilbertElement& g, double scale = 1.0) const {
        for (const auto& t : boundary_trace(g))
            if (std::abs(t) > tol::trace * std::max(1.0, scale)) return false;
        return true;
    }

    TraceVector boundary_trace(const HilbertElement& g) const {
        check(g);
        TraceVector t;
        for (std::size_t c = 0; c < Channels; ++c) {
            const auto b = boundary_values(g.channel(c));
            t.push_back(b.value);
            t.push_back(reflected(c) ? -b.derivative : b.derivative);
        }
        return t;
    }

    /// An element of D(S*) with prescribed traces: a e^{-x} + (b + a) x e^{-x}
    /// has value a and derivative b.
    HilbertElement lift_trace(const TraceVector& t) const {
        if (t.size() != 2 * Channels) throw DimensionMismatch("trace vector of size " + std::to_string(t.size()));
        HilbertElement g(Channels);
        for (std::size_t c = 0; c < Channels; ++c) {
            const Complex a = t[2 * c];
            const Complex b = reflected(c) ? -t[2 * c + 1] : t[2 * c + 1];
            g.channel(c) = ExpPoly::term(a, 0, 1.0) + ExpPoly::term(b + a, 1, 1.0);
        }
        return g;
    }

private:
    static void check(const HilbertElement& g) {
        if (g.channel_count() != Channels) {
            throw DimensionMismatch("model has " + std::to_string(Channels) + " channels, element has " +
                                    std::to_string(g.channel_count()));
        }
    }
};

using HalfLineModel = LaplacianModel<1>;
using TwoHalfLinesModel = LaplacianModel<2>;

static_assert(SymmetricModel<HalfLineModel>);
static_assert(SymmetricModel<TwoHalfLinesModel>);

inline HalfLineModel make_halfline_model() { return {}; }
inline TwoHalfLinesModel make_twohalflines_model() { return {}; }

/// kappa_eps = (1 + eps^2)^{1/8} sqrt(cos(arctan(eps) / 2)), so that
/// sqrt(2) kappa_eps e^{-x sqrt(1 - i eps)} has unit norm.
inline double kappa(double eps) {
    return std::pow(1.0 + eps * eps, 0.125) * std::sqrt(std::cos(std::atan(eps) / 2.0));
}

// ---------------------------------------------------------------------------
// Extensions

/// A self-adjoint extension of S given by linear boundary conditions
/// B * trace(g) = 0 on D(S*). Its action is always the adjoint's.
template <SymmetricModel M>
class Extension {
public:
    Extension(std::string name, M model, ComplexMatrix constraints)
        : name_(std::move(name)), model_(std::move(model)), constraints_(std::move(constraints)) {
        if (constraints_.cols() != 2 * model_.channel_count()) {
            throw DimensionMismatch("boundary constraints need " + std::to_string(2 * model_.channel_count()) +
                                    " columns, got " + constraints_.shape());
        }
    }

    const std::string& name() const { return name_; }
    const M& model() const { return model_; }
    const ComplexMatrix& constraints() const { return constraints_; }

    /// Largest |B t| relative to max(1, |t|).
    double boundary_defect(const HilbertElement& g) const {
        const TraceVector t = model_.boundary_trace(g);
        double scale = 1.0;
        for (const auto& x : t) scale = std::max(scale, std::abs(x));
        double defect = 0.0;
        for (std::size_t r = 0; r < constraints_.rows(); ++r) {
            Complex s{};
            for (std::size_t c = 0; c < t.size(); ++c) s += constraints_(r, c) * t[c];
            defect = std::max(defect, std::abs(s));
        }
        return defect / scale;
    }

    bool contains(const HilbertElement& g) const { return boundary_defect(g) <= tol::trace; }

    HilbertElement apply(const HilbertElement& g) const {
        if (!contains(g)) {
            throw NotInDomain("element violates the boundary conditions of " + name_ + " (defect " +
                              std::to_string(boundary_defect(g)) + ")");
        }
        return model_.apply_adjoint(g);
    }

    /// Orthonormal basis of the admissible trace vectors { t : B t = 0 }.
    std::vector<TraceVector> admissible_traces() const {
        const ComplexMatrix ns = null_space(constraints_);
        std::vector<TraceVector> out;
        for (std::size_t j = 0; j < ns.cols(); ++j) out.push_back(ns.column(j));
        return out;
    }

private:
    std::string name_;
    M model_;
    ComplexMatrix constraints_;
};

template <SymmetricModel M>
HilbertElement apply_extension(const Extension<M>& ext, const HilbertElement& g) {
    return ext.apply(g);
}

/// S_F: every value trace vanishes.
template <SymmetricModel M>
Extension<M> make_friedrichs_extension(const M& model) {
    const std::size_t n = model.channel_count();
    ComplexMatrix b(n, 2 * n);
    for (std::size_t c = 0; c < n; ++c) b(c, 2 * c) = 1.0;
    return Extension<M>("friedrichs", model, std::move(b));
}

/// S_alpha on two half-lines: g_+(0) = g_-(0) =: g0 and g_+'(0) - g_-'(0) = alpha g0.
inline Extension<TwoHalfLinesModel> make_salpha_extension(double alpha) {
    // trace layout (g_-(0), g_-'(0), g_+(0), g_+'(0))
    ComplexMatrix b{{-1.0, 0.0, 1.0, 0.0}, {-alpha, -1.0, 0.0, 1.0}};
    return Extension<TwoHalfLinesModel>("salpha:" + std::to_string(alpha), make_twohalflines_model(), std::move(b));
}

/// The extension whose admissible boundary traces are spanned by `traces`,
/// i.e. B spans the annihilator { b : sum_k b_k t_k = 0 for all t }.
template <SymmetricModel M>
Extension<M> extension_from_traces(std::string name, const M& model, const std::vector<TraceVector>& traces) {
    const std::size_t dim = 2 * model.channel_count();
    ComplexMatrix t(traces.size(), dim);
    for (std::size_t r = 0; r < traces.size(); ++r) {
        if (traces[r].size() != dim) throw DimensionMismatch("trace vector length");
        for (std::size_t k = 0; k < dim; ++k) t(r, k) = traces[r][k];
    }
    const ComplexMatrix ns = null_space(t);
    ComplexMatrix b(ns.cols(), dim);
    for (std::size_t r = 0; r < ns.cols(); ++r)
        for (std::size_t k = 0; k < dim; ++k) b(r, k) = ns(k, r);
    return Extension<M>(std::move(name), model, std::move(b));
}

// ---------------------------------------------------------------------------
// Probe generation

namespace detail {
inline Complex random_complex(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double re = n(rng);
    return {re, n(rng)};
}

/// A random trace-free element x^2 e^{-r x} (a + b x) on every channel.
inline HilbertElement random_closure_element(std::size_t channels, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> rate(0.6, 2.5);
    HilbertElement h(channels);
    for (std::size_t c = 0; c < channels; ++c) {
        const Complex r(rate(rng), 0.0);
        const Complex a = random_complex(rng);
        const Complex b = random_complex(rng);
        h.channel(c) = ExpPoly::term(a, 2, r) + ExpPoly::term(0.5 * b, 3, r);
    }
    return h;
}
}  // namespace detail

/// Deterministic probe elements of D(ext). The first ones are the lifts of
/// an orthonormal basis of admissible traces (so the probes reach every
/// boundary direction); the rest are random admissible combinations plus a
/// random closure element.
template <SymmetricModel M>
std::vector<HilbertElement> sample_domain(const Extension<M>& ext, std::size_t count, std::uint64_t seed = 7) {
    std::mt19937_64 rng(seed);
    const auto traces = ext.admissible_traces();
    std::vector<HilbertElement> probes;
    for (std::size_t i = 0; i < count; ++i) {
        if (i < traces.size()) {
            probes.push_back(ext.model().lift_trace(traces[i]));
            continue;
        }
        TraceVector t(2 * ext.model().channel_count());
        for (const auto& basis : traces) {
            const Complex w = detail::random_complex(rng);
            for (std::size_t k = 0; k < t.size(); ++k) t[k] += w * basis[k];
        }
        probes.push_back(ext.model().lift_trace(t) + detail::random_closure_element(ext.model().channel_count(), rng));
    }
    return probes;
}

/// Random elements of D(S*) with generic traces (no boundary condition).
template <SymmetricModel M>
std::vector<HilbertElement> sample_adjoint_domain(const M& model, std::size_t count, std::uint64_t seed = 7) {
    std::mt19937_64 rng(seed);
    std::vector<HilbertElement> probes;
    for (std::size_t i = 0; i < count; ++i) {
        TraceVector t(2 * model.channel_count());
        for (auto& x : t) x = detail::random_complex(rng);
        probes.push_back(model.lift_trace(t) + detail::random_closure_element(model.channel_count(), rng));
    }
    return probes;
}

/// Random elements of D(closure): both traces vanish.
template <SymmetricModel M>
std::vector<HilbertElement> sample_closure_domain(const M& model, std::size_t count, std::uint64_t seed = 7) {
    std::mt19937_64 rng(seed);
    std::vector<HilbertElement> probes;
    for (std::size_t i = 0; i < count; ++i)
        probes.push_back(detail::random_closure_element(model.channel_count(), rng));
    return probes;
}

}  // namespace extlab
