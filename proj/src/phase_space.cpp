#include "masslab/phase_space.hpp"

#include <cmath>
#include <stdexcept>

namespace masslab {

double reduce_angle(double a) {
    double r = std::fmod(a, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

double circle_distance(double a, double b) {
    const double d = reduce_angle(a - b);
    return std::min(d, two_pi - d);
}

namespace {

void check_sizes(std::size_t n, std::size_t a, std::size_t b, std::size_t c) {
    if (a != n || b != n || c != n) {
        throw std::invalid_argument("phase-space point: per-particle arrays must share a length");
    }
}

}  // namespace

PhaseSpacePointR::PhaseSpacePointR(double t_, std::vector<Vec3> x_, std::vector<Vec3> p_,
                                   std::vector<double> zeta_, std::vector<double> mass_)
    : t(t_), x(std::move(x_)), p(std::move(p_)), zeta(std::move(zeta_)), mass(std::move(mass_)) {
    check_sizes(x.size(), p.size(), zeta.size(), mass.size());
}

PhaseSpacePointS1::PhaseSpacePointS1(double t_, std::vector<Vec3> x_, std::vector<Vec3> p_,
                                     std::vector<double> zeta_, std::vector<double> n_)
    : t(t_), x(std::move(x_)), p(std::move(p_)), zeta(std::move(zeta_)), n(std::move(n_)) {
    check_sizes(x.size(), p.size(), zeta.size(), n.size());
    for (double& z : zeta) z = reduce_angle(z);
    for (double nk : n) {
        if (nk == 0.0) throw std::invalid_argument("circle model: n_k must be nonzero");
    }
}

PhaseSpacePointR f_transform(const ExtendedElement& a, const Gauge& gauge,
                             const PhaseSpacePointR& pt) {
    const GroupElement& g = a.g;
    const GroupElement ginv = inverse(g);
    const double xi_inv = cocycle_xi(ginv, g, gauge);

    PhaseSpacePointR out = pt;
    out.t = pt.t + g.time_shift;
    for (std::size_t k = 0; k < pt.particles(); ++k) {
        out.x[k] = g.space_shift + pt.t * g.boost + g.rot * pt.x[k];
        out.p[k] = pt.mass[k] * g.boost + g.rot * pt.p[k];
        out.zeta[k] =
            pt.zeta[k] + phase_phi(ginv, SpacetimePoint{pt.t, pt.x[k]}, gauge) - a.r - xi_inv;
    }
    return out;
}

PhaseSpacePointS1 g_transform(const ExtendedElement& a, const Gauge& gauge,
                              const PhaseSpacePointS1& pt) {
    const GroupElement& g = a.g;
    const GroupElement ginv = inverse(g);
    const double xi_inv = cocycle_xi(ginv, g, gauge);

    PhaseSpacePointS1 out = pt;
    out.t = pt.t + g.time_shift;
    for (std::size_t k = 0; k < pt.particles(); ++k) {
        const double sgn = pt.n[k] > 0.0 ? 1.0 : -1.0;
        out.x[k] = g.space_shift + pt.t * g.boost + g.rot * pt.x[k];
        out.p[k] = std::abs(pt.n[k]) * g.boost + g.rot * pt.p[k];
        out.zeta[k] = reduce_angle(
            pt.zeta[k] +
            sgn * (phase_phi(ginv, SpacetimePoint{pt.t, pt.x[k]}, gauge) - a.r - xi_inv));
    }
    return out;
}

PhaseSpacePointR free_flow(const PhaseSpacePointR& pt, double dt) {
    PhaseSpacePointR out = pt;
    out.t = pt.t + dt;
    for (std::size_t k = 0; k < pt.particles(); ++k) {
        const double m = pt.mass[k];
        if (m == 0.0) throw std::domain_error("free_flow: zero mass");
        out.x[k] = pt.x[k] + pt.p[k] * (dt / m);
        out.zeta[k] = pt.zeta[k] - pt.p[k].squaredNorm() / (2.0 * m * m) * dt;
    }
    return out;
}

PhaseSpacePointS1 free_flow(const PhaseSpacePointS1& pt, double dt) {
    PhaseSpacePointS1 out = pt;
    out.t = pt.t + dt;
    for (std::size_t k = 0; k < pt.particles(); ++k) {
        const double nk = pt.n[k];
        if (nk == 0.0) throw std::domain_error("free_flow: zero charge");
        const double sgn = nk > 0.0 ? 1.0 : -1.0;
        out.x[k] = pt.x[k] + pt.p[k] * (dt / std::abs(nk));
        out.zeta[k] =
            reduce_angle(pt.zeta[k] - sgn * pt.p[k].squaredNorm() / (2.0 * nk * nk) * dt);
    }
    return out;
}

PhaseSpacePointR apply_fixed_time(const CanonicalMap& map, const PhaseSpacePointR& pt) {
    if (map.model != PhaseModel::real_line) {
        throw std::invalid_argument("apply_fixed_time: map is not a real-line model map");
    }
    return f_transform(map.element, map.gauge, free_flow(pt, -map.element.g.time_shift));
}

PhaseSpacePointS1 apply_fixed_time(const CanonicalMap& map, const PhaseSpacePointS1& pt) {
    if (map.model != PhaseModel::circle) {
        throw std::invalid_argument("apply_fixed_time: map is not a circle model map");
    }
    return g_transform(map.element, map.gauge, free_flow(pt, -map.element.g.time_shift));
}

namespace {

template <class Point>
Eigen::VectorXd flatten(const Point& pt, const std::vector<double>& momentum_like) {
    const std::size_t n = pt.particles();
    Eigen::VectorXd v(8 * static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        v.segment<3>(3 * static_cast<Eigen::Index>(k)) = pt.x[k];
        v(3 * static_cast<Eigen::Index>(n) + static_cast<Eigen::Index>(k)) = pt.zeta[k];
        v.segment<3>(4 * static_cast<Eigen::Index>(n) + 3 * static_cast<Eigen::Index>(k)) =
            pt.p[k];
        v(7 * static_cast<Eigen::Index>(n) + static_cast<Eigen::Index>(k)) = momentum_like[k];
    }
    return v;
}

}  // namespace

Eigen::VectorXd canonical_coords(const PhaseSpacePointR& pt) { return flatten(pt, pt.mass); }
Eigen::VectorXd canonical_coords(const PhaseSpacePointS1& pt) { return flatten(pt, pt.n); }

PhaseSpacePointR with_coords(const PhaseSpacePointR& like, const Eigen::VectorXd& v) {
    const auto n = static_cast<Eigen::Index>(like.particles());
    if (v.size() != 8 * n) throw std::invalid_argument("with_coords: wrong dimension");
    PhaseSpacePointR out = like;
    for (Eigen::Index k = 0; k < n; ++k) {
        out.x[static_cast<std::size_t>(k)] = v.segment<3>(3 * k);
        out.zeta[static_cast<std::size_t>(k)] = v(3 * n + k);
        out.p[static_cast<std::size_t>(k)] = v.segment<3>(4 * n + 3 * k);
        out.mass[static_cast<std::size_t>(k)] = v(7 * n + k);
    }
    return out;
}

PhaseSpacePointS1 with_coords(const PhaseSpacePointS1& like, const Eigen::VectorXd& v) {
    const auto n = static_cast<Eigen::Index>(like.particles());
    if (v.size() != 8 * n) throw std::invalid_argument("with_coords: wrong dimension");
    std::vector<Vec3> x(like.x), p(like.p);
    std::vector<double> zeta(like.zeta), charges(like.n);
    for (Eigen::Index k = 0; k < n; ++k) {
        x[static_cast<std::size_t>(k)] = v.segment<3>(3 * k);
        zeta[static_cast<std::size_t>(k)] = v(3 * n + k);
        p[static_cast<std::size_t>(k)] = v.segment<3>(4 * n + 3 * k);
        charges[static_cast<std::size_t>(k)] = v(7 * n + k);
    }
    return PhaseSpacePointS1(like.t, std::move(x), std::move(p), std::move(zeta),
                             std::move(charges));
}

double symplectic_defect(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map,
                         const Eigen::VectorXd& at, const std::vector<int>& angular,
                         double step) {
    const Eigen::Index dim = at.size();
    if (dim % 2 != 0) throw std::invalid_argument("symplectic_defect: odd phase-space dimension");

    std::vector<bool> is_angular(static_cast<std::size_t>(dim), false);
    for (int i : angular) is_angular[static_cast<std::size_t>(i)] = true;

    Eigen::MatrixXd jac(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        Eigen::VectorXd lo = at, hi = at;
        hi(j) += step;
        lo(j) -= step;
        const Eigen::VectorXd fhi = map(hi);
        const Eigen::VectorXd flo = map(lo);
        for (Eigen::Index i = 0; i < dim; ++i) {
            double diff = fhi(i) - flo(i);
            if (is_angular[static_cast<std::size_t>(i)]) {
                diff = std::remainder(diff, two_pi);
            }
            jac(i, j) = diff / (2.0 * step);
        }
    }

    const Eigen::Index half = dim / 2;
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(dim, dim);
    omega.block(0, half, half, half) = Eigen::MatrixXd::Identity(half, half);
    omega.block(half, 0, half, half) = -Eigen::MatrixXd::Identity(half, half);

    return (jac.transpose() * omega * jac - omega).cwiseAbs().maxCoeff();
}

double symplectic_defect(const CanonicalMap& map, const PhaseSpacePointR& pt) {
    const auto fn = [&map, &pt](const Eigen::VectorXd& v) {
        return canonical_coords(apply_fixed_time(map, with_coords(pt, v)));
    };
    return symplectic_defect(fn, canonical_coords(pt));
}

double symplectic_defect(const CanonicalMap& map, const PhaseSpacePointS1& pt) {
    const auto n = static_cast<int>(pt.particles());
    std::vector<int> angular;
    for (int k = 0; k < n; ++k) angular.push_back(3 * n + k);
    const auto fn = [&map, &pt](const Eigen::VectorXd& v) {
        return canonical_coords(apply_fixed_time(map, with_coords(pt, v)));
    };
    return symplectic_defect(fn, canonical_coords(pt), angular);
}

}  // namespace masslab
