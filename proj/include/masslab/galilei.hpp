// Galilei group arithmetic: group law, spacetime action, phase functions,
// 2-cocycles and the R-central extension they generate.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <span>

namespace masslab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat5 = Eigen::Matrix<double, 5, 5>;

// Proper rotation, stored as an orthogonal matrix with det = +1.
// Orthogonality and determinant are checked to 1e-12 on construction.
class Rotation {
public:
    Rotation() : m_(Mat3::Identity()) {}
    explicit Rotation(const Mat3& m);

    static Rotation identity() { return Rotation(); }
    static Rotation axis_angle(const Vec3& axis, double angle);

    const Mat3& matrix() const { return m_; }
    Rotation inverse() const;

    Vec3 operator*(const Vec3& v) const { return m_ * v; }
    Rotation operator*(const Rotation& other) const { return Rotation(m_ * other.m_); }

private:
    Mat3 m_;
};

// Element (c, c_vec, v_vec, R): time shift, space shift, boost velocity, rotation.
struct GroupElement {
    double time_shift = 0.0;
    Vec3 space_shift = Vec3::Zero();
    Vec3 boost = Vec3::Zero();
    Rotation rot;

    static GroupElement identity() { return GroupElement{}; }
};

struct SpacetimePoint {
    double t = 0.0;
    Vec3 x = Vec3::Zero();
};

// Assignment g -> gamma_g of phase constants fixing the cocycle representative.
// Normalized: gamma at the identity must vanish (checked on construction).
class Gauge {
public:
    Gauge() : f_([](const GroupElement&) { return 0.0; }) {}
    explicit Gauge(std::function<double(const GroupElement&)> f);

    static Gauge zero() { return Gauge(); }

    double operator()(const GroupElement& g) const { return f_(g); }

private:
    std::function<double(const GroupElement&)> f_;
};

// Pair (r, g) of the R-central extension.
struct ExtendedElement {
    double r = 0.0;
    GroupElement g;

    static ExtendedElement identity() { return ExtendedElement{}; }
};

// Product left*right: apply `right` first, then `left`.
GroupElement compose(const GroupElement& left, const GroupElement& right);
GroupElement inverse(const GroupElement& g);

// 5x5 embedding  [R v c; 0 1 c_t; 0 0 1]  acting on (x, t, 1).
Mat5 to_matrix(const GroupElement& g);

// t' = t + c,  x' = c_vec + t v_vec + R x.
SpacetimePoint act_spacetime(const GroupElement& g, const SpacetimePoint& p);

// phi_g(t,x) = v_g . x - v_g^2 t / 2 + gamma_g
double phase_phi(const GroupElement& g, const SpacetimePoint& p, const Gauge& gauge);

// xi(g2,g1) = phi_g1(g2^{-1}(t,x)) + phi_g2(t,x) - phi_{g2 g1}(t,x), which is
// independent of (t,x); cocycle_xi evaluates at the origin, cocycle_xi_at at a
// caller-supplied point (used to exercise the point-independence invariant).
double cocycle_xi(const GroupElement& g2, const GroupElement& g1, const Gauge& gauge);
double cocycle_xi_at(const GroupElement& g2, const GroupElement& g1, const Gauge& gauge,
                     const SpacetimePoint& p);

// (r_a, g_a)(r_b, g_b) = (r_a + r_b + xi(g_a, g_b), g_a g_b)
ExtendedElement ext_compose(const ExtendedElement& a, const ExtendedElement& b, const Gauge& gauge);

// (r, g)^{-1} = (-r - xi(g^{-1}, g), g^{-1})
ExtendedElement ext_inverse(const ExtendedElement& a, const Gauge& gauge);

// Accumulated multiplier Omega with U_{g1}...U_{gn} = Omega U_{g1...gn},
// reduced left to right. |Omega| = 1.
std::complex<double> word_multiplier(std::span<const GroupElement> word, double mass,
                                     const Gauge& gauge);

// Phase of U_f^{-1} U_g^{-1} U_f U_g for f a space translation by `shift` and
// g a boost by `boost`, with true operator inverses, so the result is gauge
// independent. Equals exp(-i * mass * shift.boost); the unit constant in the
// exponent was pinned against a discretized momentum-space representation of
// the translation/boost operators (see tests).
std::complex<double> bargmann_commutator_phase(const Vec3& shift, const Vec3& boost, double mass,
                                               const Gauge& gauge);

}  // namespace masslab
