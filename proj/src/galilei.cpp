#include "masslab/galilei.hpp"

#include <cmath>
#include <stdexcept>

namespace masslab {

namespace {
constexpr double kRotationTol = 1e-12;
}

Rotation::Rotation(const Mat3& m) : m_(m) {
    const double ortho = (m_.transpose() * m_ - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (ortho > kRotationTol) {
        throw std::invalid_argument("Rotation: matrix is not orthogonal");
    }
    if (std::abs(m_.determinant() - 1.0) > kRotationTol) {
        throw std::invalid_argument("Rotation: determinant must be +1");
    }
}

Rotation Rotation::axis_angle(const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (n == 0.0) {
        if (angle == 0.0) return identity();
        throw std::invalid_argument("Rotation: zero axis with nonzero angle");
    }
    return Rotation(Eigen::AngleAxisd(angle, axis / n).toRotationMatrix());
}

Rotation Rotation::inverse() const { return Rotation(m_.transpose()); }

Gauge::Gauge(std::function<double(const GroupElement&)> f) : f_(std::move(f)) {
    if (!f_) throw std::invalid_argument("Gauge: empty function");
    if (std::abs(f_(GroupElement::identity())) > 1e-12) {
        throw std::invalid_argument("Gauge: gamma must vanish at the identity");
    }
}

GroupElement compose(const GroupElement& left, const GroupElement& right) {
    GroupElement out;
    out.time_shift = right.time_shift + left.time_shift;
    out.space_shift =
        left.rot * right.space_shift + right.time_shift * left.boost + left.space_shift;
    out.boost = left.rot * right.boost + left.boost;
    out.rot = left.rot * right.rot;
    return out;
}

GroupElement inverse(const GroupElement& g) {
    const Rotation rinv = g.rot.inverse();
    GroupElement out;
    out.time_shift = -g.time_shift;
    out.space_shift = rinv * (g.time_shift * g.boost - g.space_shift);
    out.boost = -(rinv * g.boost);
    out.rot = rinv;
    return out;
}

Mat5 to_matrix(const GroupElement& g) {
    Mat5 m = Mat5::Identity();
    m.block<3, 3>(0, 0) = g.rot.matrix();
    m.block<3, 1>(0, 3) = g.boost;
    m.block<3, 1>(0, 4) = g.space_shift;
    m(3, 4) = g.time_shift;
    return m;
}

SpacetimePoint act_spacetime(const GroupElement& g, const SpacetimePoint& p) {
    return SpacetimePoint{p.t + g.time_shift, g.space_shift + p.t * g.boost + g.rot * p.x};
}

double phase_phi(const GroupElement& g, const SpacetimePoint& p, const Gauge& gauge) {
    return g.boost.dot(p.x) - 0.5 * g.boost.squaredNorm() * p.t + gauge(g);
}

double cocycle_xi_at(const GroupElement& g2, const GroupElement& g1, const Gauge& gauge,
                     const SpacetimePoint& p) {
    const SpacetimePoint moved = act_spacetime(inverse(g2), p);
    return phase_phi(g1, moved, gauge) + phase_phi(g2, p, gauge) -
           phase_phi(compose(g2, g1), p, gauge);
}

double cocycle_xi(const GroupElement& g2, const GroupElement& g1, const Gauge& gauge) {
    return cocycle_xi_at(g2, g1, gauge, SpacetimePoint{});
}

ExtendedElement ext_compose(const ExtendedElement& a, const ExtendedElement& b,
                            const Gauge& gauge) {
    return ExtendedElement{a.r + b.r + cocycle_xi(a.g, b.g, gauge), compose(a.g, b.g)};
}

ExtendedElement ext_inverse(const ExtendedElement& a, const Gauge& gauge) {
    const GroupElement ginv = inverse(a.g);
    return ExtendedElement{-a.r - cocycle_xi(ginv, a.g, gauge), ginv};
}

std::complex<double> word_multiplier(std::span<const GroupElement> word, double mass,
                                     const Gauge& gauge) {
    if (word.empty()) throw std::invalid_argument("word_multiplier: empty word");
    double phase = 0.0;
    GroupElement prefix = word[0];
    for (std::size_t i = 1; i < word.size(); ++i) {
        phase += cocycle_xi(prefix, word[i], gauge);
        prefix = compose(prefix, word[i]);
    }
    return std::exp(std::complex<double>(0.0, mass * phase));
}

std::complex<double> bargmann_commutator_phase(const Vec3& shift, const Vec3& boost, double mass,
                                               const Gauge& gauge) {
    GroupElement f;
    f.space_shift = shift;
    GroupElement g;
    g.boost = boost;
    const GroupElement finv = inverse(f);
    const GroupElement ginv = inverse(g);

    const GroupElement word[] = {finv, ginv, f, g};
    const std::complex<double> omega = word_multiplier(word, mass, gauge);

    // U_h^{-1} = exp(-i M xi(h^{-1},h)) U_{h^{-1}} turns element inverses into
    // operator inverses; the leftover word reduces to the identity element.
    const double correction = cocycle_xi(finv, f, gauge) + cocycle_xi(ginv, g, gauge);
    return omega * std::exp(std::complex<double>(0.0, -mass * correction));
}

}  // namespace masslab
