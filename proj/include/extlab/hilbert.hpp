#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "extlab/errors.hpp"
#include "extlab/exppoly.hpp"

namespace extlab {

/// An element of a finite orthogonal sum of L^2(R+) copies, one ExpPoly per
/// channel. Channels of a model that live on the negative half-line are
/// stored reflected, x -> -x, which is unitary, so the inner product is the
/// plain channel-wise sum.
class HilbertElement {
public:
    HilbertElement() = default;
    explicit HilbertElement(std::size_t channels) : channels_(channels) {}
    explicit HilbertElement(std::vector<ExpPoly> channels) : channels_(std::move(channels)) {}
    HilbertElement(std::initializer_list<ExpPoly> channels) : channels_(channels) {}

    /// Element with `p` on channel `c` and zero elsewhere.
    static HilbertElement on_channel(std::size_t channels, std::size_t c, ExpPoly p) {
        HilbertElement h(channels);
        h.channels_.at(c) = std::move(p);
        return h;
    }

    std::size_t channel_count() const { return channels_.size(); }
    const ExpPoly& channel(std::size_t c) const { return channels_.at(c); }
    ExpPoly& channel(std::size_t c) { return channels_.at(c); }
    const std::vector<ExpPoly>& channels() const { return channels_; }

    bool is_zero() const {
        for (const auto& p : channels_)
            if (!p.is_zero()) return false;
        return true;
    }
    double max_coeff() const {
        double m = 0.0;
        for (const auto& p : channels_) m = std::max(m, p.max_coeff());
        return m;
    }

    template <class F>
    HilbertElement map(F&& f) const {
        HilbertElement r(channels_.size());
        for (std::size_t c = 0; c < channels_.size(); ++c) r.channels_[c] = f(channels_[c]);
        return r;
    }

    friend HilbertElement operator+(const HilbertElement& a, const HilbertElement& b) {
        a.require_same_channels(b);
        HilbertElement r(a.channels_.size());
        for (std::size_t c = 0; c < a.channels_.size(); ++c) r.channels_[c] = a.channels_[c] + b.channels_[c];
        return r;
    }
    friend HilbertElement operator-(const HilbertElement& a, const HilbertElement& b) {
        a.require_same_channels(b);
        HilbertElement r(a.channels_.size());
        for (std::size_t c = 0; c < a.channels_.size(); ++c) r.channels_[c] = a.channels_[c] - b.channels_[c];
        return r;
    }
    friend HilbertElement operator-(const HilbertElement& a) {
        return a.map([](const ExpPoly& p) { return -p; });
    }
    friend HilbertElement operator*(Complex s, const HilbertElement& a) {
        return a.map([s](const ExpPoly& p) { return s * p; });
    }
    HilbertElement& operator+=(const HilbertElement& b) { return *this = *this + b; }
    HilbertElement& operator-=(const HilbertElement& b) { return *this = *this - b; }

    friend bool operator==(const HilbertElement&, const HilbertElement&) = default;

private:
    void require_same_channels(const HilbertElement& b) const {
        if (channels_.size() != b.channels_.size()) {
            throw DimensionMismatch("channel counts " + std::to_string(channels_.size()) + " and " +
                                    std::to_string(b.channels_.size()));
        }
    }

    std::vector<ExpPoly> channels_;
};

inline Complex inner_product(const HilbertElement& a, const HilbertElement& b) {
    if (a.channel_count() != b.channel_count()) throw DimensionMismatch("inner product across channel counts");
    Complex s{};
    for (std::size_t c = 0; c < a.channel_count(); ++c) s += inner_product(a.channel(c), b.channel(c));
    return s;
}

inline double norm(const HilbertElement& a) { return std::sqrt(std::max(inner_product(a, a).real(), 0.0)); }

/// Function object form of the inner product, for the generic linalg helpers.
struct HilbertInner {
    Complex operator()(const HilbertElement& a, const HilbertElement& b) const { return inner_product(a, b); }
};

/// Orthogonal projection onto the span of an orthonormal family.
inline HilbertElement project_onto(const std::vector<HilbertElement>& orthonormal, const HilbertElement& h) {
    HilbertElement r(h.channel_count());
    for (const auto& e : orthonormal) r += inner_product(e, h) * e;
    return r;
}

/// Coordinates <e_i, h> of h in an orthonormal family.
inline std::vector<Complex> coordinates(const std::vector<HilbertElement>& orthonormal, const HilbertElement& h) {
    std::vector<Complex> c;
    c.reserve(orthonormal.size());
    for (const auto& e : orthonormal) c.push_back(inner_product(e, h));
    return c;
}

inline HilbertElement combine(const std::vector<HilbertElement>& basis, const std::vector<Complex>& coords,
                              std::size_t channels) {
    if (basis.size() != coords.size()) {
        throw DimensionMismatch(std::to_string(coords.size()) + " coordinates for a basis of " +
                                std::to_string(basis.size()));
    }
    HilbertElement r(channels);
    for (std::size_t i = 0; i < basis.size(); ++i) r += coords[i] * basis[i];
    return r;
}

inline void to_json(nlohmann::json& j, const HilbertElement& h) { j = h.channels(); }
inline void from_json(const nlohmann::json& j, HilbertElement& h) { h = HilbertElement(j.get<std::vector<ExpPoly>>()); }

}  // namespace extlab
