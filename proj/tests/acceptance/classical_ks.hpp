#pragma once

#include <vector>

namespace classical {

// Parabolic-elliptic Keller-Segel on the periodic square [-L/2, L/2)^2,
//   rho_t = Delta rho - div(rho grad c),  -Delta c = rho (mean-free),
// by a full complex-spectrum integrating-factor RK4 with its own wavenumbers
// and 2/3 dealiasing of the product. rho is N x N row-major, first index x1.
// Shares no code with the library.
std::vector<double> solve(const std::vector<double>& rho0, int N, double L, double T, int steps);

}  // namespace classical
