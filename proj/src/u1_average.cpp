#include "masslab/u1_average.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace masslab {

std::complex<double> uniform_phase_average(double x) {
    // (exp(ix) - 1)/(ix) = sinc(x/2) exp(ix/2), free of cancellation
    if (x == 0.0) return {1.0, 0.0};
    const double half = 0.5 * x;
    return std::sin(half) / half * std::exp(std::complex<double>(0.0, half));
}

namespace {

// tr(rho P_M A P_M') for the ordered sector pair (s, t): the coefficient of
// exp(i theta (M_t - M_s)) in tr(rho U*_theta A U_theta).
std::complex<double> cross_term(const DensityOperator& rho, const SectorOperator& a,
                                Eigen::Index s, Eigen::Index t) {
    return (rho.block(t, s).cwiseProduct(a.block(s, t).transpose())).sum();
}

std::complex<double> block_diagonal_trace(const DensityOperator& rho, const SectorOperator& a) {
    std::complex<double> out = 0.0;
    for (Eigen::Index s = 0; s < rho.space().sectors(); ++s) out += cross_term(rho, a, s, s);
    return out;
}

void require_same_space(const DensityOperator& rho, const SectorOperator& a) {
    if (!(rho.space() == a.space())) {
        throw std::invalid_argument("u1 average: state and observable on different spaces");
    }
}

}  // namespace

AverageReport u1_average_integer(const DensityOperator& rho, const SectorOperator& a,
                                 int grid_size) {
    require_same_space(rho, a);
    const SectoredSpace& space = rho.space();

    for (Eigen::Index s = 0; s < space.sectors(); ++s) {
        if (std::abs(space.mass(s) - std::round(space.mass(s))) > 1e-9) {
            throw std::invalid_argument("u1_average_integer: spectrum is not integer");
        }
    }
    const double range = space.mass(space.sectors() - 1) - space.mass(0);
    if (grid_size < 1 || static_cast<double>(grid_size) <= 2.0 * range) {
        throw std::invalid_argument("u1_average_integer: grid too coarse, aliasing");
    }

    const Eigen::Index dim = space.dim();
    VectorXcd phases(dim);
    std::complex<double> acc = 0.0;
    for (int j = 0; j < grid_size; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / grid_size;
        for (Eigen::Index s = 0; s < space.sectors(); ++s) {
            const std::complex<double> u = std::exp(std::complex<double>(0.0, theta * space.mass(s)));
            phases.segment(space.offset(s), space.sector_dim(s)).setConstant(u);
        }
        // tr(rho U* A U) with U = diag(phases)
        const MatrixXcd conj_a =
            phases.conjugate().asDiagonal() * a.matrix() * phases.asDiagonal();
        acc += (rho.matrix().cwiseProduct(conj_a.transpose())).sum();
    }

    AverageReport rep;
    rep.value = acc / static_cast<double>(grid_size);
    rep.reference = block_diagonal_trace(rho, a);
    rep.parameter = grid_size;
    rep.deviation = std::abs(rep.value - rep.reference);
    return rep;
}

AverageReport u1_average_longperiod(const DensityOperator& rho, const SectorOperator& a,
                                    double period) {
    require_same_space(rho, a);
    if (!(period > 0.0)) throw std::invalid_argument("u1_average_longperiod: period must be > 0");
    const SectoredSpace& space = rho.space();

    std::complex<double> value = block_diagonal_trace(rho, a);
    for (Eigen::Index s = 0; s < space.sectors(); ++s) {
        for (Eigen::Index t = 0; t < space.sectors(); ++t) {
            if (s == t) continue;
            const double gap = space.mass(t) - space.mass(s);
            value += cross_term(rho, a, s, t) * uniform_phase_average(gap * period);
        }
    }

    AverageReport rep;
    rep.value = value;
    rep.reference = block_diagonal_trace(rho, a);
    rep.parameter = period;
    rep.deviation = std::abs(rep.value - rep.reference);
    return rep;
}

double longperiod_deviation_bound(const DensityOperator& rho, const SectorOperator& a,
                                  double period) {
    require_same_space(rho, a);
    if (!(period > 0.0)) throw std::invalid_argument("longperiod_deviation_bound: period <= 0");
    const SectoredSpace& space = rho.space();
    if (space.sectors() < 2) return 0.0;

    double min_gap = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (Eigen::Index s = 0; s < space.sectors(); ++s) {
        for (Eigen::Index t = 0; t < space.sectors(); ++t) {
            if (s == t) continue;
            min_gap = std::min(min_gap, std::abs(space.mass(t) - space.mass(s)));
            sum += std::abs(cross_term(rho, a, s, t));
        }
    }
    return 2.0 / (min_gap * period) * sum;
}

}  // namespace masslab
