#pragma once

// Boundary maps of the canonical triplet (ker S*, Gamma_0, Gamma_1), their
// imaginary eps-family, both decompositions of D(S*), the gap between
// subspaces, and the two reconstruction procedures connecting the unitary
// label U_eps of an extension with its self-adjoint label T.
//
// Operator norms below are evaluated on joint finite spans. That is exact
// here: a difference of finite-rank orthogonal projections is self-adjoint
// with range inside the sum of the two ranges, and it vanishes on the
// orthogonal complement of that sum.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "extlab/errors.hpp"
#include "extlab/hilbert.hpp"
#include "extlab/linalg.hpp"
#include "extlab/models.hpp"
#include "extlab/quadrature.hpp"

namespace extlab {

/// Which deficiency space of the pair at +-i eps: Minus is ker(S* - i eps),
/// Plus is ker(S* + i eps).
enum class Side { Minus, Plus };

inline constexpr double kEpsMin = 1e-5;
inline constexpr double kEpsMax = 0.5;

inline void check_eps(double eps) {
    if (!(eps >= kEpsMin && eps <= kEpsMax)) {
        throw EpsOutOfRange("eps = " + std::to_string(eps) + " outside [1e-5, 0.5]");
    }
}

/// The spectral point whose kernel is the `side` deficiency space.
inline Complex spectral_point(double eps, Side side) {
    return side == Side::Minus ? Complex(0.0, eps) : Complex(0.0, -eps);
}

template <SymmetricModel M>
HilbertElement project_deficiency(const M& model, Complex z, const HilbertElement& h) {
    return project_onto(model.deficiency_basis(z), h);
}

// ---------------------------------------------------------------------------
// Boundary maps

/// Gamma_0 g = g - S_D^{-1} S* g. The difference lies in ker S*; it is
/// returned projected there, which removes the rounding residue left on the
/// e^{-k x} terms when S* g has 1/eps-sized deficiency components.
template <SymmetricModel M>
HilbertElement gamma0(const M& model, const HilbertElement& g) {
    return project_deficiency(model, 0.0, g - model.distinguished_resolvent(model.apply_adjoint(g)));
}

/// g - S_D^{-1} S* g without the final projection, for checking that it lies in ker S*.
template <SymmetricModel M>
HilbertElement gamma0_unprojected(const M& model, const HilbertElement& g) {
    return g - model.distinguished_resolvent(model.apply_adjoint(g));
}

/// Gamma_1 g = P_{ker S*} S* g.
template <SymmetricModel M>
HilbertElement gamma1(const M& model, const HilbertElement& g) {
    return project_deficiency(model, 0.0, model.apply_adjoint(g));
}

/// Gamma_{1,eps}^- g = P_{ker(S* - i eps)} (S* + i eps) g and
/// Gamma_{1,eps}^+ g = P_{ker(S* + i eps)} (S* - i eps) g.
template <SymmetricModel M>
HilbertElement gamma1_eps(const M& model, const HilbertElement& g, double eps, Side side) {
    check_eps(eps);
    const Complex z = spectral_point(eps, side);
    // (S* + i eps) = (S* - conj(z)) for side Minus, and symmetrically for Plus.
    return project_deficiency(model, z, model.apply_shifted(g, std::conj(z)));
}

/// Upsilon_eps = (Gamma_{1,eps}^- - Gamma_{1,eps}^+) / (2 i eps).
template <SymmetricModel M>
HilbertElement upsilon_eps(const M& model, const HilbertElement& g, double eps) {
    const Complex inv = 1.0 / Complex(0.0, 2.0 * eps);
    return inv * (gamma1_eps(model, g, eps, Side::Minus) - gamma1_eps(model, g, eps, Side::Plus));
}

/// Gamma_{0,eps} = Gamma_0 Upsilon_eps.
template <SymmetricModel M>
HilbertElement gamma0_eps(const M& model, const HilbertElement& g, double eps) {
    return gamma0(model, upsilon_eps(model, g, eps));
}

// ---------------------------------------------------------------------------
// Decompositions of D(S*)

namespace detail {
inline double trace_scale(const TraceVector& t) {
    double s = 1.0;
    for (const auto& x : t) s = std::max(s, std::abs(x));
    return s;
}

template <SymmetricModel M>
void require_closure_member(const M& model, const HilbertElement& f, double scale, const char* what) {
    if (!model.closure_membership(f, scale)) {
        throw ConsistencyFailure(std::string(what) + " is not in the closure domain (traces do not vanish)");
    }
}

template <SymmetricModel M>
void require_kernel_member(const M& model, const HilbertElement& v, Complex z, const char* what) {
    const double residual = model.apply_shifted(v, z).max_coeff();
    if (residual > 1e-9 * std::max(1.0, v.max_coeff())) {
        throw ConsistencyFailure(std::string(what) + " is not in the expected kernel (residual " +
                                 std::to_string(residual) + ")");
    }
}
}  // namespace detail

/// g = f_eps + u_eps - v_eps with f_eps in D(closure), u_eps in ker(S* - i eps),
/// v_eps in ker(S* + i eps).
struct VnDecomposition {
    HilbertElement f_eps;
    HilbertElement u_eps;
    HilbertElement v_eps;
    double eps = 0.0;
};

template <SymmetricModel M>
VnDecomposition decompose_vn(const M& model, const HilbertElement& g, double eps) {
    const Complex inv = 1.0 / Complex(0.0, 2.0 * eps);
    VnDecomposition d;
    d.eps = eps;
    d.u_eps = inv * gamma1_eps(model, g, eps, Side::Minus);
    d.v_eps = inv * gamma1_eps(model, g, eps, Side::Plus);
    d.f_eps = g - d.u_eps + d.v_eps;
    const double scale = std::max(detail::trace_scale(model.boundary_trace(d.u_eps)),
                                  detail::trace_scale(model.boundary_trace(d.v_eps)));
    detail::require_closure_member(model, d.f_eps, scale, "f_eps");
    detail::require_kernel_member(model, d.u_eps, spectral_point(eps, Side::Minus), "u_eps");
    detail::require_kernel_member(model, d.v_eps, spectral_point(eps, Side::Plus), "v_eps");
    return d;
}

/// g = f + S_D^{-1} u1 + u0 with f in D(closure) and u0, u1 in ker S*.
struct KvbDecomposition {
    HilbertElement f;
    HilbertElement u1;
    HilbertElement u0;
};

template <SymmetricModel M>
KvbDecomposition decompose_kvb(const M& model, const HilbertElement& g) {
    KvbDecomposition d;
    d.u0 = gamma0(model, g);
    d.u1 = gamma1(model, g);
    d.f = g - model.distinguished_resolvent(d.u1) - d.u0;
    detail::require_closure_member(model, d.f, detail::trace_scale(model.boundary_trace(g)), "f");
    detail::require_kernel_member(model, d.u0, 0.0, "u0");
    return d;
}

// ---------------------------------------------------------------------------
// Gap metric

struct GapResult {
    double delta_ab = 0.0;
    double delta_ba = 0.0;
    double delta_hat = 0.0;
};

namespace detail {
/// delta(A, B) for orthonormal families: the largest singular value of
/// (1 - P_B) restricted to span A, from the Gram matrix of the residuals.
inline double directed_gap(const std::vector<HilbertElement>& a, const std::vector<HilbertElement>& b) {
    if (a.empty()) return 0.0;
    std::vector<HilbertElement> residuals;
    for (const auto& v : a) residuals.push_back(v - project_onto(b, v));
    const auto eig = hermitian_eigen(hermitian_part(gram(residuals, HilbertInner{})));
    return std::sqrt(std::max(eig.values.back(), 0.0));
}
}  // namespace detail

/// Gap between span(A) and span(B): delta(U, V) = sup over unit u in U of dist(u, V).
inline GapResult subspace_gap(const std::vector<HilbertElement>& a, const std::vector<HilbertElement>& b) {
    const auto qa = orthonormalize(a, HilbertInner{});
    const auto qb = orthonormalize(b, HilbertInner{});
    GapResult r;
    r.delta_ab = detail::directed_gap(qa, qb);
    r.delta_ba = detail::directed_gap(qb, qa);
    r.delta_hat = std::max(r.delta_ab, r.delta_ba);
    return r;
}

/// ||P_V - P_W|| for orthonormal families V, W, as the largest |eigenvalue|
/// of the difference restricted to span(V + W).
inline double projection_difference_norm(const std::vector<HilbertElement>& v, const std::vector<HilbertElement>& w) {
    std::vector<HilbertElement> all = v;
    all.insert(all.end(), w.begin(), w.end());
    const auto joint = orthonormalize(all, HilbertInner{});
    const std::size_t n = joint.size();
    auto coords = [&](const std::vector<HilbertElement>& family) {
        ComplexMatrix c(family.size(), n);
        for (std::size_t k = 0; k < family.size(); ++k)
            for (std::size_t j = 0; j < n; ++j) c(k, j) = inner_product(family[k], joint[j]);
        return c;
    };
    const ComplexMatrix cv = coords(v);
    const ComplexMatrix cw = coords(w);
    return hermitian_norm(hermitian_part(cv.adjoint() * cv - cw.adjoint() * cw));
}

/// ||P_{ker(S* -+ i eps)} - P_{ker S*}||, side Minus taking ker(S* - i eps).
template <SymmetricModel M>
double projection_gap_norm(const M& model, double eps, Side side) {
    check_eps(eps);
    return projection_difference_norm(model.deficiency_basis(spectral_point(eps, side)), model.deficiency_basis(0.0));
}

// ---------------------------------------------------------------------------
// Extension labels

/// Matrix of the von Neumann label U : ker(S* - z) -> ker(S* - conj z) in the
/// model's orthonormal deficiency bases at z and conj z.
struct VnParameter {
    Complex z;
    ComplexMatrix matrix;
    std::optional<double> theta;  // d = 1 only: U = e^{i theta}, theta in [0, 2 pi)
    double unitarity_defect = 0.0;
    double fit_residual = 0.0;
};

/// Self-adjoint label T acting in span(domain_basis), a subspace of ker S*.
struct KvbParameter {
    std::vector<HilbertElement> domain_basis;
    ComplexMatrix t_matrix;
    std::vector<HilbertElement> complement_basis;
};

/// For g in D(ext): u_eps^(g), U_eps u_eps^(g), and f_eps^(g) = g - u + U u.
struct VnComponents {
    HilbertElement u_eps;
    HilbertElement u_eps_image;
    HilbertElement f_eps;
};

template <SymmetricModel M>
VnComponents vn_components(const Extension<M>& ext, const HilbertElement& g, double eps) {
    check_eps(eps);
    const M& model = ext.model();
    const HilbertElement sg = ext.apply(g);
    const Complex ie(0.0, eps);
    const Complex inv = 1.0 / (2.0 * ie);
    VnComponents c;
    c.u_eps = inv * project_deficiency(model, ie, sg + ie * g);
    c.u_eps_image = inv * project_deficiency(model, -ie, sg - ie * g);
    c.f_eps = g - c.u_eps + c.u_eps_image;
    const double scale = std::max(detail::trace_scale(model.boundary_trace(c.u_eps)),
                                  detail::trace_scale(model.boundary_trace(c.u_eps_image)));
    detail::require_closure_member(model, c.f_eps, scale, "f_eps^(g)");
    return c;
}

namespace detail {
inline void check_imaginary_point(Complex z) {
    if (z.real() != 0.0 || z.imag() <= 0.0) {
        throw InvalidArgument("spectral point must be i*eps with eps > 0");
    }
    check_eps(z.imag());
}

/// Least-squares U from U X = Y, where the columns of X, Y are the
/// coordinates of P_{ker(S*-z)} (S~ - conj z) g and P_{ker(S*-conj z)} (S~ - z) g.
template <SymmetricModel M>
VnParameter fit_unitary(const M& model, Complex z, const std::vector<HilbertElement>& domain_elements) {
    check_imaginary_point(z);
    const auto from = model.deficiency_basis(z);
    const auto to = model.deficiency_basis(std::conj(z));
    const std::size_t d = from.size();
    const std::size_t n = domain_elements.size();
    ComplexMatrix x(d, n);
    ComplexMatrix y(d, n);
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const HilbertElement& g = domain_elements[j];
        const HilbertElement sg = model.apply_adjoint(g);
        scale = std::max(scale, norm(sg) + std::abs(z) * norm(g));
        const auto xs = coordinates(from, sg - std::conj(z) * g);
        const auto ys = coordinates(to, sg - z * g);
        for (std::size_t i = 0; i < d; ++i) {
            x(i, j) = xs[i];
            y(i, j) = ys[i];
        }
    }
    // closure elements map to rounding noise here, which the relative rank test alone would accept
    const auto pinv = x.max_abs() > 1e-8 * scale ? right_pseudo_inverse(x, 1e-8) : std::nullopt;
    if (!pinv) {
        throw InsufficientProbes("probe images do not span the " + std::to_string(d) +
                                 "-dimensional deficiency space");
    }
    VnParameter p;
    p.z = z;
    p.matrix = y * *pinv;
    p.unitarity_defect = (p.matrix.adjoint() * p.matrix - ComplexMatrix::identity(d)).max_abs();
    p.fit_residual = (p.matrix * x - y).max_abs() / std::max(1.0, y.max_abs());
    if (p.unitarity_defect > 1e-7) {
        throw NotUnitary("reconstructed label has unitarity defect " + std::to_string(p.unitarity_defect));
    }
    if (d == 1) {
        double th = std::arg(p.matrix(0, 0));
        if (th < 0.0) th += 2.0 * std::numbers::pi;
        if (th >= 2.0 * std::numbers::pi) th = 0.0;
        p.theta = th;
    }
    return p;
}
}  // namespace detail

/// U P_{ker(S*-z)} (S~ - conj z) g = P_{ker(S*-conj z)} (S~ - z) g over the
/// probes, solved for the matrix of U. Only z = i eps is accepted.
template <SymmetricModel M>
VnParameter reconstruct_U(const Extension<M>& ext, Complex z, const std::vector<HilbertElement>& probes) {
    for (const auto& g : probes) {
        if (!ext.contains(g)) throw NotInDomain("probe outside D(" + ext.name() + ")");
    }
    return detail::fit_unitary(ext.model(), z, probes);
}

/// f + u - U u with u = sum coords_i e_i(z): a domain vector of S_U.
template <SymmetricModel M>
HilbertElement vn_domain_vector(const M& model, const VnParameter& vn, const HilbertElement& f,
                                const std::vector<Complex>& coords) {
    const auto from = model.deficiency_basis(vn.z);
    const auto to = model.deficiency_basis(std::conj(vn.z));
    if (coords.size() != from.size()) throw DimensionMismatch("coordinates for ker(S* - z)");
    std::vector<Complex> image(to.size());
    for (std::size_t i = 0; i < to.size(); ++i)
        for (std::size_t j = 0; j < coords.size(); ++j) image[i] += vn.matrix(i, j) * coords[j];
    const std::size_t ch = model.channel_count();
    return f + combine(from, coords, ch) - combine(to, image, ch);
}

/// The extension S_U labelled by a von Neumann parameter, as boundary conditions.
template <SymmetricModel M>
Extension<M> extension_from_vn(const M& model, const VnParameter& vn) {
    std::vector<TraceVector> traces;
    const std::size_t d = model.deficiency_index();
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<Complex> e(d);
        e[j] = 1.0;
        traces.push_back(model.boundary_trace(vn_domain_vector(model, vn, HilbertElement(model.channel_count()), e)));
    }
    return extension_from_traces("vn", model, traces);
}

/// For g in D(ext): u^(g) = (1 - S_D^{-1} S~) g, T u^(g) + w^(g) = P_{ker S*} S~ g,
/// f^(g) = S_D^{-1} (1 - P_{ker S*}) S~ g.
struct KvbComponents {
    HilbertElement f;
    HilbertElement u;
    HilbertElement t_u_plus_w;
};

template <SymmetricModel M>
KvbComponents kvb_components(const Extension<M>& ext, const HilbertElement& g) {
    const M& model = ext.model();
    const HilbertElement sg = ext.apply(g);
    KvbComponents c;
    c.u = g - model.distinguished_resolvent(sg);
    c.t_u_plus_w = project_deficiency(model, 0.0, sg);
    c.f = model.distinguished_resolvent(sg - c.t_u_plus_w);
    const double scale = detail::trace_scale(model.boundary_trace(g));
    detail::require_closure_member(model, c.f, scale, "f^(g)");
    detail::require_kernel_member(model, c.u, 0.0, "u^(g)");
    const double residual = norm(g - (c.f + model.distinguished_resolvent(c.t_u_plus_w) + c.u));
    if (residual > 1e-9 * std::max(1.0, norm(g))) {
        throw ConsistencyFailure("g != f + S_D^{-1}(Tu + w) + u, residual " + std::to_string(residual));
    }
    return c;
}

/// Assembled T together with diagnostics of the assembly.
struct KvbReconstruction {
    KvbParameter parameter;
    double asymmetry = 0.0;            // max |T - T^H| / 2 before symmetrization
    double extrapolation_error = 0.0;  // Richardson error estimate (0 for the direct route)
    std::vector<HilbertElement> u_limits;         // u^(g) per probe
    std::vector<HilbertElement> t_u_plus_w_limits;  // T u^(g) + w^(g) per probe
};

inline constexpr double kDomainRankTol = 1e-7;

namespace detail {
/// Builds (D(T), T, complement) from pairs a_g = u^(g), b_g = T u^(g) + w^(g).
///
/// D(T) is the rank-filtered span of the a_g. Since the pairs depend
/// linearly on g, polarization of the quadratic forms <a_g, b_g> gives the
/// sesquilinear form F_gh = <a_g, b_h> = <a_g, T a_h>; with K a right inverse
/// of the coordinate matrix A of the a_g, T = K^H F K in the basis of D(T).
template <SymmetricModel M>
KvbReconstruction assemble_kvb(const M& model, std::vector<HilbertElement> a, std::vector<HilbertElement> b,
                               double reference_norm) {
    KvbReconstruction r;
    auto& p = r.parameter;
    p.domain_basis = orthonormalize(a, HilbertInner{}, {kDomainRankTol, reference_norm});
    const std::size_t rank = p.domain_basis.size();

    std::vector<HilbertElement> rest;
    for (const auto& k : model.deficiency_basis(0.0)) rest.push_back(k - project_onto(p.domain_basis, k));
    p.complement_basis = orthonormalize(rest, HilbertInner{}, {1e-6, 1.0});
    if (rank + p.complement_basis.size() != model.deficiency_index()) {
        throw ConsistencyFailure("domain and complement do not split ker S*");
    }

    if (rank == 0) {
        p.t_matrix = ComplexMatrix(0, 0);
    } else {
        const std::size_t n = a.size();
        ComplexMatrix coords(rank, n);
        for (std::size_t i = 0; i < rank; ++i)
            for (std::size_t g = 0; g < n; ++g) coords(i, g) = inner_product(p.domain_basis[i], a[g]);
        const auto k = right_pseudo_inverse(coords, 1e-8);
        if (!k) throw InsufficientProbes("limit vectors do not determine T on its domain");
        ComplexMatrix form(n, n);
        for (std::size_t g = 0; g < n; ++g)
            for (std::size_t h = 0; h < n; ++h) form(g, h) = inner_product(a[g], b[h]);
        const ComplexMatrix t = k->adjoint() * form * *k;
        r.asymmetry = hermitian_defect(t) / 2.0;
        p.t_matrix = hermitian_part(t);
    }
    r.u_limits = std::move(a);
    r.t_u_plus_w_limits = std::move(b);
    return r;
}

/// Linear extrapolation to 0 through (e1, v1), (e2, v2); for e2 = e1 / 2 this
/// is the two-point Richardson value 2 v(e1/2) - v(e1).
inline HilbertElement richardson(double e1, const HilbertElement& v1, double e2, const HilbertElement& v2) {
    return (1.0 / (e1 - e2)) * (Complex(e1) * v2 - Complex(e2) * v1);
}

inline void check_grid(std::span<const double> grid) {
    if (grid.size() < 3) throw InvalidArgument("eps grid needs at least 3 points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        check_eps(grid[i]);
        if (i > 0 && !(grid[i] < grid[i - 1])) throw InvalidArgument("eps grid must be strictly decreasing");
    }
}
}  // namespace detail

inline constexpr double kExtrapolationTol = 1e-5;

/// T from U_eps: for each probe, a_eps = (1 - S_D^{-1} S~)(u_eps - U_eps u_eps)
/// and b_eps = i eps (u_eps + U_eps u_eps) are extrapolated to eps = 0 from
/// the two smallest grid points. The pair from the next-larger grid points
/// gives the error estimate.
template <SymmetricModel M>
KvbReconstruction reconstruct_T(const Extension<M>& ext, const std::vector<HilbertElement>& probes,
                                std::span<const double> eps_grid) {
    detail::check_grid(eps_grid);
    if (probes.empty()) throw InsufficientProbes("no probes");
    const M& model = ext.model();
    const std::size_t n = eps_grid.size();
    const double e0 = eps_grid[n - 3];
    const double e1 = eps_grid[n - 2];
    const double e2 = eps_grid[n - 1];

    std::vector<HilbertElement> a_lim;
    std::vector<HilbertElement> b_lim;
    double reference = 0.0;
    double error = 0.0;
    for (const auto& g : probes) {
        reference = std::max(reference, norm(g));
        std::array<HilbertElement, 3> a;
        std::array<HilbertElement, 3> b;
        const std::array<double, 3> eps{e0, e1, e2};
        for (std::size_t k = 0; k < 3; ++k) {
            const VnComponents c = vn_components(ext, g, eps[k]);
            a[k] = gamma0(model, c.u_eps - c.u_eps_image);
            b[k] = Complex(0.0, eps[k]) * (c.u_eps + c.u_eps_image);
        }
        a_lim.push_back(detail::richardson(e1, a[1], e2, a[2]));
        b_lim.push_back(detail::richardson(e1, b[1], e2, b[2]));
        error = std::max({error, quadrature_norm(a_lim.back() - detail::richardson(e0, a[0], e1, a[1])),
                          quadrature_norm(b_lim.back() - detail::richardson(e0, b[0], e1, b[1]))});
    }
    if (error > kExtrapolationTol * std::max(1.0, reference)) {
        throw ExtrapolationDivergence("Richardson error estimate " + std::to_string(error) + " exceeds 1e-5");
    }
    KvbReconstruction r = detail::assemble_kvb(model, std::move(a_lim), std::move(b_lim), reference);
    r.extrapolation_error = error;
    return r;
}

template <SymmetricModel M>
KvbReconstruction reconstruct_T(const Extension<M>& ext, const std::vector<HilbertElement>& probes,
                                const std::vector<double>& eps_grid) {
    return reconstruct_T(ext, probes, std::span<const double>(eps_grid));
}

/// T assembled directly from the z = 0 components of each probe, no limits.
template <SymmetricModel M>
KvbReconstruction kvb_parameter_direct(const Extension<M>& ext, const std::vector<HilbertElement>& probes) {
    if (probes.empty()) throw InsufficientProbes("no probes");
    std::vector<HilbertElement> a;
    std::vector<HilbertElement> b;
    double reference = 0.0;
    for (const auto& g : probes) {
        const KvbComponents c = kvb_components(ext, g);
        a.push_back(c.u);
        b.push_back(c.t_u_plus_w);
        reference = std::max(reference, norm(g));
    }
    return detail::assemble_kvb(ext.model(), std::move(a), std::move(b), reference);
}

/// g = f + S_D^{-1}(T u + w) + u, with u and w given by coordinates in the
/// domain and complement bases.
template <SymmetricModel M>
HilbertElement build_kvb_domain_vector(const M& model, const KvbParameter& kvb, const HilbertElement& f,
                                       const std::vector<Complex>& u_coords, const std::vector<Complex>& w_coords) {
    const std::size_t r = kvb.domain_basis.size();
    if (u_coords.size() != r || w_coords.size() != kvb.complement_basis.size() || kvb.t_matrix.rows() != r) {
        throw DimensionMismatch("coordinates do not match the KVB bases");
    }
    if (!model.closure_membership(f)) throw NotInDomain("f must lie in the closure domain");
    std::vector<Complex> tu(r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) tu[i] += kvb.t_matrix(i, j) * u_coords[j];
    const std::size_t ch = model.channel_count();
    const HilbertElement u = combine(kvb.domain_basis, u_coords, ch);
    const HilbertElement rhs = combine(kvb.domain_basis, tu, ch) + combine(kvb.complement_basis, w_coords, ch);
    return f + model.distinguished_resolvent(rhs) + u;
}

namespace detail {
/// One domain vector per basis direction of D(T) and of its complement.
template <SymmetricModel M>
std::vector<HilbertElement> kvb_boundary_vectors(const M& model, const KvbParameter& kvb) {
    const std::size_t r = kvb.domain_basis.size();
    const std::size_t c = kvb.complement_basis.size();
    const HilbertElement zero(model.channel_count());
    std::vector<HilbertElement> out;
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<Complex> u(r);
        u[i] = 1.0;
        out.push_back(build_kvb_domain_vector(model, kvb, zero, u, std::vector<Complex>(c)));
    }
    for (std::size_t j = 0; j < c; ++j) {
        std::vector<Complex> w(c);
        w[j] = 1.0;
        out.push_back(build_kvb_domain_vector(model, kvb, zero, std::vector<Complex>(r), w));
    }
    return out;
}
}  // namespace detail

/// The extension S_T labelled by a KVB parameter, as boundary conditions.
template <SymmetricModel M>
Extension<M> extension_from_kvb(const M& model, const KvbParameter& kvb) {
    std::vector<TraceVector> traces;
    for (const auto& g : detail::kvb_boundary_vectors(model, kvb)) traces.push_back(model.boundary_trace(g));
    return extension_from_traces("kvb", model, traces);
}

/// U at z from T: builds spanning domain vectors of S_T (plus one closure
/// element) and solves U from their images.
template <SymmetricModel M>
VnParameter kvb_to_vn(const M& model, const KvbParameter& kvb, Complex z, std::uint64_t seed = 11) {
    auto probes = detail::kvb_boundary_vectors(model, kvb);
    std::mt19937_64 rng(seed);
    probes.push_back(detail::random_closure_element(model.channel_count(), rng));
    return detail::fit_unitary(model, z, probes);
}

/// (projector onto D(T), T extended by 0) as d x d matrices in the
/// coordinates of the model's orthonormal basis of ker S*. Basis-free form
/// for comparing two KVB parameters.
struct KernelOperator {
    ComplexMatrix projector;
    ComplexMatrix op;
};

template <SymmetricModel M>
KernelOperator kernel_operator(const M& model, const KvbParameter& kvb) {
    const auto kernel = model.deficiency_basis(0.0);
    const std::size_t d = kernel.size();
    const std::size_t r = kvb.domain_basis.size();
    ComplexMatrix q(d, r);
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t i = 0; i < r; ++i) q(k, i) = inner_product(kernel[k], kvb.domain_basis[i]);
    if (r == 0) return {ComplexMatrix(d, d), ComplexMatrix(d, d)};
    return {q * q.adjoint(), q * kvb.t_matrix * q.adjoint()};
}

// ---------------------------------------------------------------------------
// The seven O(eps) quantities of the imaginary pre-triplet

inline constexpr std::array<const char*, 7> kPretripletIds = {
    "gamma0_of_upsilon", "gamma1_minus", "gamma1_plus", "upsilon", "adjoint_upsilon", "f_eps", "closure_f_eps"};

/// Each entry is the eps-dependent vector whose limit is the matching entry
/// of canonical_limits.
using PretripletTerms = std::array<HilbertElement, 7>;

template <SymmetricModel M>
PretripletTerms pretriplet_terms(const M& model, const HilbertElement& g, double eps) {
    const VnDecomposition d = decompose_vn(model, g, eps);
    const Complex two_ie(0.0, 2.0 * eps);
    const HilbertElement ups = d.u_eps - d.v_eps;
    return {gamma0(model, ups), two_ie * d.u_eps, two_ie * d.v_eps, ups, model.apply_adjoint(ups), d.f_eps,
            model.apply_adjoint(d.f_eps)};
}

template <SymmetricModel M>
PretripletTerms canonical_limits(const M& model, const HilbertElement& g) {
    const KvbDecomposition d = decompose_kvb(model, g);
    return {d.u0, d.u1, d.u1, model.distinguished_resolvent(d.u1) + d.u0, d.u1, d.f, model.apply_adjoint(d.f)};
}

}  // namespace extlab
