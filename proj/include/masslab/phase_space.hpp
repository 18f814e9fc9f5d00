// Canonical representations of the extended group on the classical extended
// phase spaces: the real-line model (zeta_k, m_k) and the circle model
// (zeta_k mod 2pi, n_k), plus the symplectic-defect probe.
#pragma once

#include "masslab/galilei.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace masslab {

inline constexpr double two_pi = 6.283185307179586476925286766559;

// Reduce an angle into [0, 2pi).
double reduce_angle(double a);
// Distance between two angles on the circle, in [0, pi].
double circle_distance(double a, double b);

// Per-particle (x_k, p_k, zeta_k, m_k) at a common time t.
struct PhaseSpacePointR {
    double t = 0.0;
    std::vector<Vec3> x;
    std::vector<Vec3> p;
    std::vector<double> zeta;
    std::vector<double> mass;

    PhaseSpacePointR() = default;
    PhaseSpacePointR(double t, std::vector<Vec3> x, std::vector<Vec3> p, std::vector<double> zeta,
                     std::vector<double> mass);
    std::size_t particles() const { return x.size(); }
};

// Per-particle (x_k, p_k, zeta_k, n_k); zeta stored reduced into [0, 2pi),
// n_k must be nonzero.
struct PhaseSpacePointS1 {
    double t = 0.0;
    std::vector<Vec3> x;
    std::vector<Vec3> p;
    std::vector<double> zeta;
    std::vector<double> n;

    PhaseSpacePointS1() = default;
    PhaseSpacePointS1(double t, std::vector<Vec3> x, std::vector<Vec3> p, std::vector<double> zeta,
                      std::vector<double> n);
    std::size_t particles() const { return x.size(); }
};

// x' = c_vec + t v, p' = m v + R p, zeta' = zeta + phi_{g^{-1}}(t,x) - r - xi(g^{-1},g).
PhaseSpacePointR f_transform(const ExtendedElement& a, const Gauge& gauge,
                             const PhaseSpacePointR& pt);

// As f_transform with |n| in place of m and the zeta increment multiplied by
// sign(n), reduced mod 2pi.
PhaseSpacePointS1 g_transform(const ExtendedElement& a, const Gauge& gauge,
                              const PhaseSpacePointS1& pt);

// Free-particle flow, H = sum p^2/(2m):
//   x += p dt / m, zeta += -p^2/(2 m^2) dt.
// Circle model, H = sum p^2/(2|n|):
//   x += p dt / |n|, zeta += -sign(n) p^2/(2 n^2) dt   (rate = dH/dn).
PhaseSpacePointR free_flow(const PhaseSpacePointR& pt, double dt);
PhaseSpacePointS1 free_flow(const PhaseSpacePointS1& pt, double dt);

enum class PhaseModel { real_line, circle };

// An extended element together with a gauge and a model tag. Applied at fixed
// time as: flow back by the element's time shift, then the point map.
struct CanonicalMap {
    ExtendedElement element;
    Gauge gauge;
    PhaseModel model = PhaseModel::real_line;
};

PhaseSpacePointR apply_fixed_time(const CanonicalMap& map, const PhaseSpacePointR& pt);
PhaseSpacePointS1 apply_fixed_time(const CanonicalMap& map, const PhaseSpacePointS1& pt);

// Flattened canonical coordinates [x (3N), zeta (N) | p (3N), m-or-n (N)].
Eigen::VectorXd canonical_coords(const PhaseSpacePointR& pt);
Eigen::VectorXd canonical_coords(const PhaseSpacePointS1& pt);
PhaseSpacePointR with_coords(const PhaseSpacePointR& like, const Eigen::VectorXd& v);
PhaseSpacePointS1 with_coords(const PhaseSpacePointS1& like, const Eigen::VectorXd& v);

// Max-norm of S^T Omega S - Omega, with S the central finite-difference
// Jacobian (step 1e-5) and Omega the standard symplectic matrix for the
// [q | p] layout above. Output components listed in `angular` are differenced
// on the circle.
double symplectic_defect(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map,
                         const Eigen::VectorXd& at, const std::vector<int>& angular = {},
                         double step = 1e-5);
double symplectic_defect(const CanonicalMap& map, const PhaseSpacePointR& pt);
double symplectic_defect(const CanonicalMap& map, const PhaseSpacePointS1& pt);

}  // namespace masslab
