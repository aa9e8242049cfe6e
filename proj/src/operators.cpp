#include "fks/operators.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fks/errors.hpp"
#include "fks/simd.hpp"

namespace fks {

void ModelParams::validate() const {
    if (!(beta > 0.0 && beta < 1.0))
        throw ParameterError("ModelParams: beta must lie in (0, 1)");
    if (!(alpha > 1.0 && alpha <= 2.0))
        throw ParameterError("ModelParams: alpha must lie in (1, 2]");
    if (n < 2)
        throw ParameterError("ModelParams: n must be >= 2");
    if (!(gamma_pot > 1.0 && gamma_pot <= n))
        throw ParameterError("ModelParams: gamma must lie in (1, n]");
    if (s_const && !(*s_const > 0.0))
        throw ParameterError("ModelParams: s_const must be > 0 when set");
}

double ModelParams::p_crit() const { return n / (alpha + gamma_pot - 2.0); }

namespace {

std::vector<double> power_symbol(const GridSpec& g, double power) {
    return radial_symbol(g, [power](double xi) { return xi == 0.0 ? 0.0 : std::pow(xi, power); });
}

SpectralField scaled(const SpectralField& F, const std::vector<double>& w) {
    SpectralField out(F.grid());
    simd::scale(w.data(), F.coefficients().data(), out.coefficients().data(), F.size());
    return out;
}

// i xi_j |xi|^{-gamma}, zero at xi = 0 and on the axis-Nyquist plane.
std::vector<SpectralField> gradient_of_potential(const SpectralField& F, double gamma_pot) {
    const GridSpec& g = F.grid();
    auto mt = mode_table(g);
    auto w = power_symbol(g, -gamma_pot);
    std::vector<SpectralField> out;
    out.reserve(g.n);
    for (int j = 0; j < g.n; ++j) {
        SpectralField c(g);
        for (std::size_t m = 0; m < F.size(); ++m) {
            if (mt->nyquist(m, j))
                continue;
            double xi = mt->wavenumber_unit() * mt->k(m, j);
            c[m] = cplx(0.0, xi * w[m]) * F[m];
        }
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

SpectralField frac_laplacian(const SpectralField& F, double alpha) {
    if (!(alpha > 1.0 && alpha <= 2.0))
        throw ParameterError("frac_laplacian: alpha must lie in (1, 2]");
    return scaled(F, power_symbol(F.grid(), alpha));
}

std::vector<SpectralField> interaction_field(const SpectralField& F, double gamma_pot) {
    if (!(gamma_pot > 1.0 && gamma_pot <= F.grid().n))
        throw ParameterError("interaction_field: gamma must lie in (1, n]");
    return gradient_of_potential(F, gamma_pot);
}

SpectralField apply_S(const SpectralField& F, double t, const ModelParams& params,
                      const MLAccuracyPolicy& policy) {
    params.validate();
    if (!(t >= 0.0))
        throw ParameterError("apply_S: t must be >= 0");
    if (t == 0.0)
        return F;
    MittagLeffler e1(MLOrder{params.beta, 1.0}, policy);
    const double tb = std::pow(t, params.beta);
    const double a = params.alpha;
    auto w = radial_symbol(F.grid(), [&](double xi) { return e1(std::pow(xi, a) * tb); });
    return scaled(F, w);
}

SpectralField apply_T(const SpectralField& F, double t, const ModelParams& params,
                      const MLAccuracyPolicy& policy) {
    params.validate();
    if (!(t > 0.0))
        throw ParameterError("apply_T: t must be > 0");
    MittagLeffler eb(MLOrder{params.beta, params.beta}, policy);
    const double tb = std::pow(t, params.beta);
    const double pre = std::pow(t, params.beta - 1.0);
    const double a = params.alpha;
    auto w = radial_symbol(F.grid(), [&](double xi) { return pre * eb(std::pow(xi, a) * tb); });
    return scaled(F, w);
}

std::vector<PhysicalField> nonlinear_flux(const PhysicalField& rho, const ModelParams& params) {
    params.validate();
    const GridSpec& g = rho.grid();
    auto mt = mode_table(g);
    auto B = gradient_of_potential(forward(rho), params.gamma_pot);
    std::vector<PhysicalField> out;
    for (int j = 0; j < g.n; ++j) {
        PhysicalField b = inverse(B[j]);
        simd::multiply(rho.values().data(), b.values().data(), b.values().data(), b.size());
        SpectralField gh = forward(b);
        for (std::size_t m = 0; m < gh.size(); ++m)
            if (!mt->retained(m))
                gh[m] = 0.0;
        out.push_back(inverse(gh));
    }
    return out;
}

std::vector<cplx> flux_divergence(const SpectralField& rho_hat, const PhysicalField& rho,
                                  const ModelParams& params) {
    const GridSpec& g = rho.grid();
    auto mt = mode_table(g);
    const auto& keep = mt->retained_modes();
    std::vector<cplx> div(keep.size(), cplx(0.0, 0.0));
    auto B = gradient_of_potential(rho_hat, params.gamma_pot);
    for (int j = 0; j < g.n; ++j) {
        PhysicalField b = inverse(B[j]);
        simd::multiply(rho.values().data(), b.values().data(), b.values().data(), b.size());
        SpectralField gh = forward(b);
        for (std::size_t i = 0; i < keep.size(); ++i) {
            std::size_t m = keep[i];
            if (mt->nyquist(m, j))
                continue;
            double xi = mt->wavenumber_unit() * mt->k(m, j);
            div[i] += cplx(-xi * gh[m].imag(), xi * gh[m].real());
        }
    }
    return div;
}

std::vector<cplx> flux_divergence(const PhysicalField& rho, const ModelParams& params) {
    return flux_divergence(forward(rho), rho, params);
}

namespace {

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

}  // namespace

std::array<double, 2> direct_attraction_2d(const std::function<double(double, double)>& rho,
                                           double x1, double x2, double r_max, int radial_nodes,
                                           int angular_nodes) {
    // y = x + r e(theta): (x - y)/|x - y|^2 dy = -e(theta) dr dtheta.
    const int order = 16;
    std::vector<double> gx, gw;
    gauss_legendre(order, gx, gw);
    const double R = r_max + std::hypot(x1, x2);
    const int panels = std::max(1, radial_nodes / order);
    const double pw = R / panels;
    const double dth = 2.0 * std::numbers::pi / angular_nodes;
    double i1 = 0.0, i2 = 0.0;
    for (int a = 0; a < angular_nodes; ++a) {
        double th = a * dth;
        double c = std::cos(th), s = std::sin(th);
        double line = 0.0;
        for (int p = 0; p < panels; ++p) {
            double r0 = p * pw;
            for (int q = 0; q < order; ++q) {
                double r = r0 + 0.5 * pw * (gx[q] + 1.0);
                line += 0.5 * pw * gw[q] * rho(x1 + r * c, x2 + r * s);
            }
        }
        i1 -= c * line * dth;
        i2 -= s * line * dth;
    }
    return {i1, i2};
}

InteractionCalibration calibrate_interaction_constant(double sigma, double L, int N) {
    GridSpec g{2, N, L, 2.0 / 3.0};
    g.validate();
    const double norm = 1.0 / (2.0 * std::numbers::pi * sigma * sigma);
    auto gauss = [=](double a, double b) { return norm * std::exp(-(a * a + b * b) / (2 * sigma * sigma)); };
    PhysicalField rho = sample(g, [&](std::span<const double> x) { return gauss(x[0], x[1]); });
    auto B = interaction_field(forward(rho), 2.0);
    double num = 0.0, den = 0.0;
    std::vector<std::array<double, 4>> pts;  // B1, B2, I1, I2
    for (double r : {0.25, 0.5, 0.75, 1.0}) {
        for (int q = 0; q < 4; ++q) {
            double th = 0.5 * std::numbers::pi * q + 0.3;
            double x[2] = {r * std::cos(th), r * std::sin(th)};
            double b1 = evaluate_at(B[0], x);
            double b2 = evaluate_at(B[1], x);
            auto I = direct_attraction_2d(gauss, x[0], x[1], 12.0 * sigma);
            num += b1 * I[0] + b2 * I[1];
            den += I[0] * I[0] + I[1] * I[1];
            pts.push_back({b1, b2, I[0], I[1]});
        }
    }
    InteractionCalibration out{};
    out.s_fit = -num / den;
    out.probes = static_cast<int>(pts.size());
    double imax = 0.0, res = 0.0;
    for (auto& p : pts) {
        imax = std::max(imax, std::hypot(p[2], p[3]));
        res = std::max(res, std::hypot(p[0] + out.s_fit * p[2], p[1] + out.s_fit * p[3]));
    }
    out.max_rel_residual = res / imax;
    return out;
}

}  // namespace fks
