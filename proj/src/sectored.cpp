#include "masslab/sectored.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace masslab {

MassSpectrum::MassSpectrum(std::vector<double> masses, std::vector<Eigen::Index> dims)
    : masses_(std::move(masses)), dims_(std::move(dims)) {
    if (masses_.empty() || masses_.size() != dims_.size()) {
        throw std::invalid_argument("MassSpectrum: need matching nonempty masses and dims");
    }
    double prev = 0.0;
    for (std::size_t i = 0; i < masses_.size(); ++i) {
        if (!(masses_[i] > 0.0)) {
            throw std::invalid_argument("MassSpectrum: mass values must be strictly positive");
        }
        if (i > 0 && !(masses_[i] > prev)) {
            throw std::invalid_argument("MassSpectrum: mass values must be strictly increasing");
        }
        if (dims_[i] < 1) throw std::invalid_argument("MassSpectrum: sector dims must be >= 1");
        prev = masses_[i];
    }
}

SectoredSpace::SectoredSpace(MassSpectrum spectrum) : spectrum_(std::move(spectrum)) {
    offsets_.reserve(static_cast<std::size_t>(spectrum_.sectors()));
    for (Eigen::Index s = 0; s < spectrum_.sectors(); ++s) {
        offsets_.push_back(dim_);
        dim_ += spectrum_.dim(s);
    }
}

Eigen::Index SectoredSpace::sector_of_mass(double mass) const {
    for (Eigen::Index s = 0; s < sectors(); ++s) {
        if (std::abs(spectrum_.mass(s) - mass) <= 1e-12) return s;
    }
    throw std::invalid_argument("SectoredSpace: mass value not in the spectrum");
}

StateVector::StateVector(SectoredSpace space, VectorXcd coeffs)
    : space_(std::move(space)), v_(std::move(coeffs)) {
    if (v_.size() != space_.dim()) throw std::invalid_argument("StateVector: wrong dimension");
    if (!v_.allFinite()) throw std::invalid_argument("StateVector: non-finite coefficients");
}

StateVector StateVector::normalized() const {
    const double n = v_.norm();
    if (n == 0.0) throw std::domain_error("StateVector: cannot normalize the zero vector");
    return StateVector(space_, v_ / n);
}

SectorOperator::SectorOperator(SectoredSpace space, MatrixXcd mat)
    : space_(std::move(space)), m_(std::move(mat)) {
    if (m_.rows() != space_.dim() || m_.cols() != space_.dim()) {
        throw std::invalid_argument("SectorOperator: wrong dimensions");
    }
    if (!m_.allFinite()) throw std::invalid_argument("SectorOperator: non-finite entries");
}

double SectorOperator::op_norm() const {
    if (!norm_) {
        norm_ = m_.jacobiSvd().singularValues()(0);
    }
    return *norm_;
}

DensityOperator::DensityOperator(SectoredSpace space, MatrixXcd mat)
    : space_(std::move(space)), m_(std::move(mat)) {
    if (m_.rows() != space_.dim() || m_.cols() != space_.dim()) {
        throw std::invalid_argument("DensityOperator: wrong dimensions");
    }
    const double herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10) throw std::invalid_argument("DensityOperator: not Hermitian");
    const std::complex<double> tr = m_.trace();
    if (std::abs(tr - 1.0) > 1e-10) throw std::invalid_argument("DensityOperator: trace must be 1");
    const Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        throw std::invalid_argument("DensityOperator: not positive semidefinite");
    }
}

SectorOperator sector_projector(const SectoredSpace& space, double mass) {
    const Eigen::Index s = space.sector_of_mass(mass);
    MatrixXcd m = MatrixXcd::Zero(space.dim(), space.dim());
    m.block(space.offset(s), space.offset(s), space.sector_dim(s), space.sector_dim(s)) =
        MatrixXcd::Identity(space.sector_dim(s), space.sector_dim(s));
    return SectorOperator(space, std::move(m));
}

namespace {

MatrixXcd keep_diagonal_blocks(const SectoredSpace& space, const MatrixXcd& m) {
    MatrixXcd out = MatrixXcd::Zero(space.dim(), space.dim());
    for (Eigen::Index s = 0; s < space.sectors(); ++s) {
        out.block(space.offset(s), space.offset(s), space.sector_dim(s), space.sector_dim(s)) =
            m.block(space.offset(s), space.offset(s), space.sector_dim(s), space.sector_dim(s));
    }
    return out;
}

}  // namespace

SectorOperator superselect_operator(const SectorOperator& a) {
    return SectorOperator(a.space(), keep_diagonal_blocks(a.space(), a.matrix()));
}

DensityOperator superselect_state(const DensityOperator& rho) {
    return DensityOperator(rho.space(), keep_diagonal_blocks(rho.space(), rho.matrix()));
}

DensityOperator rho_psi(const StateVector& psi) {
    if (std::abs(psi.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("rho_psi: state must be normalized");
    }
    const SectoredSpace& space = psi.space();
    MatrixXcd m = MatrixXcd::Zero(space.dim(), space.dim());
    for (Eigen::Index s = 0; s < space.sectors(); ++s) {
        const auto comp = psi.component(s);
        const double w = comp.norm();
        if (w <= 1e-14) continue;  // sector absent from the support
        m.block(space.offset(s), space.offset(s), space.sector_dim(s), space.sector_dim(s)) =
            comp * comp.adjoint();
    }
    return DensityOperator(space, std::move(m));
}

std::complex<double> expect(const DensityOperator& rho, const SectorOperator& a) {
    if (!(rho.space() == a.space())) {
        throw std::invalid_argument("expect: operator and state live on different spaces");
    }
    return (rho.matrix().cwiseProduct(a.matrix().transpose())).sum();
}

bool is_block_diagonal(const SectorOperator& a, double tol) {
    const SectoredSpace& space = a.space();
    for (Eigen::Index s = 0; s < space.sectors(); ++s) {
        for (Eigen::Index t = 0; t < space.sectors(); ++t) {
            if (s == t) continue;
            if (a.block(s, t).cwiseAbs().maxCoeff() > tol) return false;
        }
    }
    return true;
}

}  // namespace masslab
