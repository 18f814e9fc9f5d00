// Group averaging over the central U(1): exact discrete grids for integer
// spectra and closed-form long-period averages for arbitrary spectra.
#pragma once

#include "masslab/sectored.hpp"

#include <complex>

namespace masslab {

struct AverageReport {
    std::complex<double> value;
    std::complex<double> reference;  // tr(rho_B A_B)
    double parameter = 0.0;          // grid size K or period Theta
    double deviation = 0.0;          // |value - reference|
};

// Mean of exp(i w t) over t in [0, T], expressed through x = w T:
// (exp(ix) - 1)/(ix), evaluated as sinc(x/2) exp(ix/2).
std::complex<double> uniform_phase_average(double x);

// (1/K) sum_j tr(rho U*_j A U_j) with U_j = exp(i theta_j M-hat), theta_j = 2 pi j / K.
// Requires an integer spectrum and K > 2 (M_max - M_min); the discrete sum
// then equals the Haar average exactly.
AverageReport u1_average_integer(const DensityOperator& rho, const SectorOperator& a, int grid_size);

// (1/Theta) int_0^Theta tr(rho e^{-i theta M} A e^{i theta M}) d theta, summed
// per frequency component in closed form.
AverageReport u1_average_longperiod(const DensityOperator& rho, const SectorOperator& a,
                                    double period);

// (2 / (deltaM Theta)) sum_{M != M'} |tr(rho P_M A P_M')|: an a-priori bound
// on the long-period deviation.
double longperiod_deviation_bound(const DensityOperator& rho, const SectorOperator& a,
                                  double period);

}  // namespace masslab
