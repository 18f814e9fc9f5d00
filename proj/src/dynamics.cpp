#include "masslab/dynamics.hpp"

#include "masslab/u1_average.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace masslab {

SectorHamiltonian::SectorHamiltonian(SectoredSpace space, std::vector<MatrixXcd> blocks)
    : space_(std::move(space)), blocks_(std::move(blocks)) {
    if (blocks_.size() != static_cast<std::size_t>(space_.sectors())) {
        throw std::invalid_argument("SectorHamiltonian: one block per sector required");
    }
    for (Eigen::Index s = 0; s < space_.sectors(); ++s) {
        const MatrixXcd& b = blocks_[static_cast<std::size_t>(s)];
        if (b.rows() != space_.sector_dim(s) || b.cols() != space_.sector_dim(s)) {
            throw std::invalid_argument("SectorHamiltonian: block has wrong dimensions");
        }
        if ((b - b.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
            throw std::invalid_argument("SectorHamiltonian: block is not Hermitian");
        }
        const Eigen::SelfAdjointEigenSolver<MatrixXcd> es(b);
        evals_.push_back(es.eigenvalues());
        evecs_.push_back(es.eigenvectors());
    }
}

SectorHamiltonian SectorHamiltonian::from_blocks(SectoredSpace space,
                                                 std::vector<MatrixXcd> blocks) {
    return SectorHamiltonian(std::move(space), std::move(blocks));
}

SectorHamiltonian SectorHamiltonian::from_full(SectoredSpace space, const MatrixXcd& mat) {
    if (mat.rows() != space.dim() || mat.cols() != space.dim()) {
        throw std::invalid_argument("SectorHamiltonian: wrong dimensions");
    }
    std::vector<MatrixXcd> blocks;
    for (Eigen::Index s = 0; s < space.sectors(); ++s) {
        for (Eigen::Index t = 0; t < space.sectors(); ++t) {
            if (s == t) continue;
            const auto off = mat.block(space.offset(s), space.offset(t), space.sector_dim(s),
                                       space.sector_dim(t));
            if (off.cwiseAbs().maxCoeff() != 0.0) {
                throw std::invalid_argument("SectorHamiltonian: matrix is not block diagonal");
            }
        }
        blocks.push_back(mat.block(space.offset(s), space.offset(s), space.sector_dim(s),
                                   space.sector_dim(s)));
    }
    return SectorHamiltonian(std::move(space), std::move(blocks));
}

SectorHamiltonian SectorHamiltonian::zero(SectoredSpace space) {
    std::vector<MatrixXcd> blocks;
    for (Eigen::Index s = 0; s < space.sectors(); ++s) {
        blocks.push_back(MatrixXcd::Zero(space.sector_dim(s), space.sector_dim(s)));
    }
    return SectorHamiltonian(std::move(space), std::move(blocks));
}

MatrixXcd SectorHamiltonian::matrix() const {
    MatrixXcd out = MatrixXcd::Zero(space_.dim(), space_.dim());
    for (Eigen::Index s = 0; s < space_.sectors(); ++s) {
        out.block(space_.offset(s), space_.offset(s), space_.sector_dim(s), space_.sector_dim(s)) =
            blocks_[static_cast<std::size_t>(s)];
    }
    return out;
}

MatrixXcd evolution_matrix(const SectorHamiltonian& h, double t, const PhysicalConstants& k) {
    const SectoredSpace& space = h.space();
    MatrixXcd out = MatrixXcd::Zero(space.dim(), space.dim());
    for (Eigen::Index s = 0; s < space.sectors(); ++s) {
        const std::complex<double> mass_phase =
            std::exp(std::complex<double>(0.0, -t * k.c * k.c * space.mass(s) / k.hbar));
        const Eigen::VectorXd& ev = h.eigenvalues(s);
        const MatrixXcd& v = h.eigenvectors(s);
        VectorXcd ph(ev.size());
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            ph(i) = std::exp(std::complex<double>(0.0, -t * ev(i) / k.hbar));
        }
        out.block(space.offset(s), space.offset(s), space.sector_dim(s), space.sector_dim(s)) =
            mass_phase * (v * ph.asDiagonal() * v.adjoint());
    }
    return out;
}

StateVector evolve(const StateVector& psi, const SectorHamiltonian& h, double t,
                   const PhysicalConstants& k) {
    if (!(psi.space() == h.space())) {
        throw std::invalid_argument("evolve: state and Hamiltonian on different spaces");
    }
    const SectoredSpace& space = psi.space();
    VectorXcd out(space.dim());
    for (Eigen::Index s = 0; s < space.sectors(); ++s) {
        const std::complex<double> mass_phase =
            std::exp(std::complex<double>(0.0, -t * k.c * k.c * space.mass(s) / k.hbar));
        const Eigen::VectorXd& ev = h.eigenvalues(s);
        const MatrixXcd& v = h.eigenvectors(s);
        VectorXcd coeff = v.adjoint() * psi.component(s);
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            coeff(i) *= std::exp(std::complex<double>(0.0, -t * ev(i) / k.hbar));
        }
        out.segment(space.offset(s), space.sector_dim(s)) = mass_phase * (v * coeff);
    }
    return StateVector(space, std::move(out));
}

DensityOperator evolve(const DensityOperator& rho, const SectorHamiltonian& h, double t,
                       const PhysicalConstants& k) {
    if (!(rho.space() == h.space())) {
        throw std::invalid_argument("evolve: state and Hamiltonian on different spaces");
    }
    const MatrixXcd u = evolution_matrix(h, t, k);
    return DensityOperator(rho.space(), u * rho.matrix() * u.adjoint());
}

std::vector<Eigen::Index> occupied_sectors(const StateVector& psi, double tol) {
    std::vector<Eigen::Index> out;
    for (Eigen::Index s = 0; s < psi.space().sectors(); ++s) {
        if (psi.component_norm(s) > tol) out.push_back(s);
    }
    return out;
}

namespace {

constexpr double kOccupancyTol = 1e-14;

// psi and A expressed in the joint (sector, H-eigenvector) basis, with the
// Bohr frequency (mass c^2 + energy)/hbar of every joint index.
struct JointBasis {
    VectorXcd coeff;
    MatrixXcd a;
    Eigen::VectorXd omega;
    std::vector<Eigen::Index> sector_of;
};

JointBasis to_joint_basis(const StateVector& psi, const SectorOperator& a,
                          const SectorHamiltonian& h, const PhysicalConstants& k) {
    if (!(psi.space() == a.space()) || !(psi.space() == h.space())) {
        throw std::invalid_argument("dynamics: inputs live on different spaces");
    }
    const SectoredSpace& space = psi.space();
    MatrixXcd w = MatrixXcd::Zero(space.dim(), space.dim());
    JointBasis jb;
    jb.omega.resize(space.dim());
    jb.sector_of.resize(static_cast<std::size_t>(space.dim()));
    for (Eigen::Index s = 0; s < space.sectors(); ++s) {
        w.block(space.offset(s), space.offset(s), space.sector_dim(s), space.sector_dim(s)) =
            h.eigenvectors(s);
        for (Eigen::Index i = 0; i < space.sector_dim(s); ++i) {
            const Eigen::Index idx = space.offset(s) + i;
            jb.omega(idx) = (space.mass(s) * k.c * k.c + h.eigenvalues(s)(i)) / k.hbar;
            jb.sector_of[static_cast<std::size_t>(idx)] = s;
        }
    }
    jb.coeff = w.adjoint() * psi.coeffs();
    jb.a = w.adjoint() * a.matrix() * w;
    return jb;
}

void require_positive_time(double T) {
    if (!(T > 0.0)) throw std::invalid_argument("dynamics: averaging time must be > 0");
}

void require_normalized(const StateVector& psi) {
    if (std::abs(psi.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("dynamics: state must be normalized");
    }
}

std::complex<double> sector_pair_element(const StateVector& psi, const SectorOperator& a,
                                         Eigen::Index s, Eigen::Index t) {
    return psi.component(s).adjoint() * a.block(s, t) * psi.component(t);
}

}  // namespace

std::complex<double> time_avg_expectation(const StateVector& psi, const SectorOperator& a,
                                          const SectorHamiltonian& h, double T,
                                          const PhysicalConstants& k) {
    require_positive_time(T);
    require_normalized(psi);
    const JointBasis jb = to_joint_basis(psi, a, h, k);
    std::complex<double> acc = 0.0;
    for (Eigen::Index i = 0; i < jb.coeff.size(); ++i) {
        for (Eigen::Index j = 0; j < jb.coeff.size(); ++j) {
            acc += std::conj(jb.coeff(i)) * jb.coeff(j) * jb.a(i, j) *
                   uniform_phase_average((jb.omega(i) - jb.omega(j)) * T);
        }
    }
    return acc;
}

std::complex<double> dephasing_term(const StateVector& psi, const SectorOperator& a, double T,
                                    const PhysicalConstants& k) {
    require_positive_time(T);
    require_normalized(psi);
    if (!(psi.space() == a.space())) {
        throw std::invalid_argument("dephasing_term: inputs live on different spaces");
    }
    const SectoredSpace& space = psi.space();
    const std::vector<Eigen::Index> occ = occupied_sectors(psi, kOccupancyTol);
    std::complex<double> acc = 0.0;
    for (Eigen::Index s : occ) {
        for (Eigen::Index t : occ) {
            if (s == t) continue;
            const double x = (space.mass(s) - space.mass(t)) * k.c * k.c * T / k.hbar;
            acc += uniform_phase_average(x) * sector_pair_element(psi, a, s, t);
        }
    }
    return acc;
}

EnergyContent e_psi(const StateVector& psi, const SectorHamiltonian& h) {
    if (!(psi.space() == h.space())) {
        throw std::invalid_argument("e_psi: inputs live on different spaces");
    }
    EnergyContent out;
    for (Eigen::Index s : occupied_sectors(psi, kOccupancyTol)) {
        const VectorXcd coeff = h.eigenvectors(s).adjoint() * psi.component(s);
        const Eigen::VectorXd& ev = h.eigenvalues(s);
        double weight = 0.0, first = 0.0, second = 0.0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            const double w = std::norm(coeff(i));
            weight += w;
            first += ev(i) * w;
            second += ev(i) * ev(i) * w;
        }
        // <H>^2 + Delta H^2 with unnormalized spectral measure:
        // first^2 (1 - weight) + second
        const double e_sq = first * first * (1.0 - weight) + second;
        out.value = std::max(out.value, std::sqrt(std::max(e_sq, 0.0)));
        out.max_component_norm = std::max(out.max_component_norm, std::sqrt(second));
    }
    return out;
}

DecoherenceWindow decoherence_window(double delta_m, double energy, double n_count, double norm_a,
                                     const PhysicalConstants& k) {
    if (!(delta_m > 0.0) || !(energy > 0.0) || !(n_count > 0.0) || !(norm_a > 0.0)) {
        throw std::invalid_argument("decoherence_window: all parameters must be positive");
    }
    DecoherenceWindow w;
    w.t_low = 2.0 * k.hbar * n_count * n_count * norm_a / (delta_m * k.c * k.c);
    w.t_high = k.hbar / (2.0 * n_count * n_count * norm_a * energy);
    return w;
}

ErrorBudget error_budget(const StateVector& psi, const SectorOperator& a,
                         const SectorHamiltonian& h, double T, const PhysicalConstants& k) {
    require_positive_time(T);
    require_normalized(psi);
    const SectoredSpace& space = psi.space();
    const std::vector<Eigen::Index> occ = occupied_sectors(psi, kOccupancyTol);

    ErrorBudget b;
    b.value = time_avg_expectation(psi, a, h, T, k);
    b.reference = 0.0;
    for (Eigen::Index s : occ) b.reference += sector_pair_element(psi, a, s, s);
    b.dephasing = dephasing_term(psi, a, T, k);
    b.residual = b.value - b.reference - b.dephasing;

    b.occupied = static_cast<int>(occ.size());
    b.delta_m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < occ.size(); ++i) {
        for (std::size_t j = i + 1; j < occ.size(); ++j) {
            b.delta_m = std::min(b.delta_m, std::abs(space.mass(occ[i]) - space.mass(occ[j])));
        }
    }
    const EnergyContent ec = e_psi(psi, h);
    b.e_psi = ec.value;
    b.norm_a = a.op_norm();

    const double n_sq = static_cast<double>(b.occupied) * static_cast<double>(b.occupied);
    b.bound_dephasing = occ.size() > 1
                            ? 2.0 * k.hbar * n_sq * b.norm_a / (b.delta_m * k.c * k.c * T)
                            : 0.0;
    b.bound_residual = 2.0 * T * n_sq * b.norm_a * b.e_psi / k.hbar;

    double sum_h_norm = 0.0, sum_norm = 0.0;
    for (Eigen::Index s : occ) {
        sum_h_norm += (h.block(s) * psi.component(s)).norm();
        sum_norm += psi.component_norm(s);
    }
    b.bound_residual_intermediate = 2.0 * T * b.norm_a * sum_h_norm * sum_norm / k.hbar;

    const auto violates = [](double measured, double bound) {
        return measured > bound * (1.0 + 1e-9) + 1e-13;
    };
    if (violates(std::abs(b.dephasing), b.bound_dephasing)) {
        throw std::logic_error("error_budget: dephasing bound violated");
    }
    if (violates(std::abs(b.residual), b.bound_residual_intermediate)) {
        throw std::logic_error("error_budget: residual bound violated");
    }
    b.residual_within_energy_bound =
        std::abs(b.residual) <= b.bound_residual * (1.0 + 1e-9) + 1e-13;

    if (occ.size() > 1 && b.e_psi > 0.0) {
        const DecoherenceWindow w =
            decoherence_window(b.delta_m, b.e_psi, static_cast<double>(b.occupied), b.norm_a, k);
        b.t_low = w.t_low;
        b.t_high = w.t_high;
    } else if (b.e_psi > 0.0) {
        b.t_low = 0.0;
        b.t_high = k.hbar / (2.0 * n_sq * b.norm_a * b.e_psi);
    } else {
        b.t_low = 0.0;
        b.t_high = std::numeric_limits<double>::infinity();
    }
    return b;
}

ErrorBudget error_budget_mixture(const std::vector<std::pair<double, StateVector>>& ensemble,
                                 const SectorOperator& a, const SectorHamiltonian& h, double T,
                                 const PhysicalConstants& k) {
    if (ensemble.empty()) throw std::invalid_argument("error_budget_mixture: empty ensemble");
    double total = 0.0;
    for (const auto& [w, psi] : ensemble) {
        if (!(w > 0.0)) throw std::invalid_argument("error_budget_mixture: weights must be > 0");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("error_budget_mixture: weights must sum to 1");
    }

    ErrorBudget out;
    out.delta_m = std::numeric_limits<double>::infinity();
    out.t_high = std::numeric_limits<double>::infinity();
    bool first = true;
    for (const auto& [w, psi] : ensemble) {
        const ErrorBudget b = error_budget(psi, a, h, T, k);
        out.value += w * b.value;
        out.reference += w * b.reference;
        out.dephasing += w * b.dephasing;
        out.residual += w * b.residual;
        out.bound_dephasing += w * b.bound_dephasing;
        out.bound_residual += w * b.bound_residual;
        out.bound_residual_intermediate += w * b.bound_residual_intermediate;
        out.residual_within_energy_bound =
            (first ? true : out.residual_within_energy_bound) && b.residual_within_energy_bound;
        out.t_low = std::max(out.t_low, b.t_low);
        out.t_high = std::min(out.t_high, b.t_high);
        out.delta_m = std::min(out.delta_m, b.delta_m);
        out.e_psi = std::max(out.e_psi, b.e_psi);
        out.occupied = std::max(out.occupied, b.occupied);
        out.norm_a = b.norm_a;
        first = false;
    }
    return out;
}

ResidualReport residual_prop2(const StateVector& psi, const SectorOperator& a,
                              const SectorHamiltonian& h, double T, const PhysicalConstants& k) {
    require_positive_time(T);
    require_normalized(psi);
    const JointBasis jb = to_joint_basis(psi, a, h, k);
    const SectoredSpace& space = psi.space();

    ResidualReport rep;
    std::complex<double> full = 0.0, same_sector = 0.0, cross = 0.0;
    for (Eigen::Index i = 0; i < jb.coeff.size(); ++i) {
        for (Eigen::Index j = 0; j < jb.coeff.size(); ++j) {
            const std::complex<double> weight = std::conj(jb.coeff(i)) * jb.coeff(j) * jb.a(i, j);
            const std::complex<double> avg_full =
                uniform_phase_average((jb.omega(i) - jb.omega(j)) * T);
            full += weight * avg_full;
            const Eigen::Index si = jb.sector_of[static_cast<std::size_t>(i)];
            const Eigen::Index sj = jb.sector_of[static_cast<std::size_t>(j)];
            if (si == sj) {
                same_sector += weight * avg_full;  // mass phases cancel within a sector
            } else {
                const double x_mass = (space.mass(si) - space.mass(sj)) * k.c * k.c * T / k.hbar;
                cross += weight * (avg_full - uniform_phase_average(x_mass));
            }
        }
    }
    rep.value = cross;
    rep.time_avg_full = full;
    rep.time_avg_superselected = same_sector;

    const std::vector<Eigen::Index> occ = occupied_sectors(psi, kOccupancyTol);
    double delta_m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < occ.size(); ++i) {
        for (std::size_t j = i + 1; j < occ.size(); ++j) {
            delta_m = std::min(delta_m, std::abs(space.mass(occ[i]) - space.mass(occ[j])));
        }
    }
    const double n_sq = static_cast<double>(occ.size()) * static_cast<double>(occ.size());
    rep.bound = occ.size() > 1
                    ? 2.0 * a.op_norm() * n_sq * e_psi(psi, h).value / (delta_m * k.c * k.c)
                    : 0.0;
    return rep;
}

}  // namespace masslab
