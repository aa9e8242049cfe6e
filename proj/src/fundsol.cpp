#include "fks/fundsol.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fks/errors.hpp"

namespace fks {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_resolved(double t, const GridSpec& grid, const ModelParams& params) {
    if (!(t > 0.0))
        throw ParameterError("kernel time must be > 0");
    double width = std::pow(t, params.beta / params.alpha);
    if (width < 2.0 * grid.spacing())
        throw ResolutionError("kernel width t^(beta/alpha) = " + std::to_string(width) +
                              " is below 2h = " + std::to_string(2.0 * grid.spacing()));
}

SpectralField delta_spectrum(const GridSpec& g) {
    SpectralField F(g);
    for (auto& c : F.coefficients())
        c = 1.0;
    return F;
}

// i xi_j times the symbol, Nyquist components dropped.
std::vector<PhysicalField> gradient(const SpectralField& F) {
    const GridSpec& g = F.grid();
    auto mt = mode_table(g);
    std::vector<PhysicalField> out;
    for (int j = 0; j < g.n; ++j) {
        SpectralField d(g);
        for (std::size_t m = 0; m < F.size(); ++m) {
            if (mt->nyquist(m, j))
                continue;
            d[m] = cplx(0.0, mt->wavenumber_unit() * mt->k(m, j)) * F[m];
        }
        out.push_back(inverse(d));
    }
    return out;
}

PhysicalField magnitude(const std::vector<PhysicalField>& v) {
    PhysicalField out(v[0].grid());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (const auto& c : v)
            s += c[i] * c[i];
        out[i] = std::sqrt(s);
    }
    return out;
}

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

}  // namespace

PhysicalField build_P(double t, const GridSpec& grid, const ModelParams& params,
                      const MLAccuracyPolicy& policy) {
    params.validate();
    require_resolved(t, grid, params);
    return inverse(apply_S(delta_spectrum(grid), t, params, policy));
}

PhysicalField build_Y(double t, const GridSpec& grid, const ModelParams& params,
                      const MLAccuracyPolicy& policy) {
    params.validate();
    require_resolved(t, grid, params);
    return inverse(apply_T(delta_spectrum(grid), t, params, policy));
}

std::vector<PhysicalField> build_grad_P(double t, const GridSpec& grid, const ModelParams& params,
                                        const MLAccuracyPolicy& policy) {
    params.validate();
    require_resolved(t, grid, params);
    return gradient(apply_S(delta_spectrum(grid), t, params, policy));
}

std::vector<PhysicalField> build_grad_Y(double t, const GridSpec& grid, const ModelParams& params,
                                        const MLAccuracyPolicy& policy) {
    params.validate();
    require_resolved(t, grid, params);
    return gradient(apply_T(delta_spectrum(grid), t, params, policy));
}

bool resolvable(double t, const GridSpec& grid, const ModelParams& params) {
    double w = std::pow(t, params.beta / params.alpha);
    return w >= 2.0 * grid.spacing() && w <= grid.side_length / 8.0;
}

RadialProfile radial_profile(const PhysicalField& f) {
    const GridSpec& g = f.grid();
    const double h = g.spacing();
    const int N = g.points_per_axis;
    const int n = g.n;
    std::size_t bins = static_cast<std::size_t>(std::sqrt(double(n)) * N / 2) + 2;
    std::vector<double> rs(bins, 0.0), vs(bins, 0.0);
    std::vector<std::size_t> cnt(bins, 0);
    int idx[3] = {0, 0, 0};
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::size_t r = i;
        double r2 = 0.0;
        for (int a = n - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(r % N);
            r /= N;
            double x = g.coordinate(idx[a]);
            r2 += x * x;
        }
        double rad = std::sqrt(r2);
        std::size_t b = static_cast<std::size_t>(rad / h);
        rs[b] += rad;
        vs[b] += f[i];
        ++cnt[b];
    }
    RadialProfile p;
    for (std::size_t b = 0; b < bins; ++b) {
        if (cnt[b] == 0)
            continue;
        p.radius.push_back(rs[b] / cnt[b]);
        p.value.push_back(vs[b] / cnt[b]);
        p.count.push_back(cnt[b]);
    }
    return p;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ParameterError("fit_slope: need at least two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

double tail_exponent_fit(const PhysicalField& kernel, const ModelParams& params, double t) {
    params.validate();
    if (!(params.alpha < 2.0))
        throw ParameterError("tail_exponent_fit: needs alpha < 2 (power-law tail)");
    const double inner = 4.0 * std::pow(t, params.beta / params.alpha);
    const double outer = 0.4 * kernel.grid().side_length;
    if (outer < 2.0 * inner)
        throw ResolutionError("tail_exponent_fit: annulus [4 t^(beta/alpha), 0.4 L] is too narrow");
    RadialProfile prof = radial_profile(kernel);
    std::vector<double> r, v;
    for (std::size_t i = 0; i < prof.radius.size(); ++i) {
        if (prof.radius[i] < inner || prof.radius[i] > outer || !(prof.value[i] > 0.0))
            continue;
        r.push_back(prof.radius[i]);
        v.push_back(prof.value[i]);
    }
    if (r.size() < 3)
        throw ResolutionError("tail_exponent_fit: too few positive shells in the annulus");
    return fit_slope(r, v);
}

const char* law_name(LawKind k) {
    switch (k) {
        case LawKind::P: return "P";
        case LawKind::gradP: return "gradP";
        case LawKind::Y: return "Y";
        case LawKind::gradY: return "gradY";
        case LawKind::S_rq: return "S";
        case LawKind::T_rq: return "T";
    }
    return "?";
}

KappaThresholds kappa_thresholds(int n, double alpha) {
    auto k = [n](double d) { return d > 0.0 ? n / d : kInf; };
    return {k(n - alpha), k(n - alpha + 1.0), k(n - 2.0 * alpha), k(n - 2.0 * alpha + 1.0)};
}

double DecayLaw::predicted_slope(const ModelParams& prm) const {
    const double c = prm.n * prm.beta / prm.alpha;
    switch (kind) {
        case LawKind::P: return -c * (1.0 - inv(p));
        case LawKind::gradP: return -c * (1.0 - inv(p)) - prm.beta / prm.alpha;
        case LawKind::Y: return -c * (1.0 - inv(p)) + prm.beta - 1.0;
        case LawKind::gradY: return -c * (1.0 - inv(p)) - prm.beta / prm.alpha + prm.beta - 1.0;
        case LawKind::S_rq: return -c * (inv(q) - inv(p));
        case LawKind::T_rq: return -c * (inv(q) - inv(p)) + prm.beta - 1.0;
    }
    return 0.0;
}

void DecayLaw::check_validity(const ModelParams& prm) const {
    prm.validate();
    if (!(p >= 1.0))
        throw DomainError("decay law: p must be >= 1");
    auto kap = kappa_thresholds(prm.n, prm.alpha);
    auto below = [&](double thr, const char* name) {
        if (!(p < thr)) {
            std::ostringstream os;
            os << "decay law " << law_name(kind) << ": p = " << p << " is not below " << name << " = " << thr;
            throw DomainError(os.str());
        }
    };
    switch (kind) {
        case LawKind::P: below(kap.k1, "kappa1 = n/(n-alpha)"); break;
        case LawKind::gradP: below(kap.k2, "kappa2 = n/(n-alpha+1)"); break;
        case LawKind::Y: below(kap.k3, "kappa3 = n/(n-2 alpha)"); break;
        case LawKind::gradY: below(kap.k4, "kappa4 = n/(n-2 alpha+1)"); break;
        case LawKind::S_rq:
        case LawKind::T_rq: {
            if (!(q >= 1.0) || !(p >= q))
                throw DomainError("operator law: need 1 <= q <= r");
            if (std::isinf(q))
                break;
            double a = (kind == LawKind::S_rq) ? prm.alpha : 2.0 * prm.alpha;
            double theta = (prm.n > q * a) ? q * prm.n / (prm.n - q * a) : kInf;
            if (!(p < theta) && !(std::isinf(p) && std::isinf(theta)))
                below(theta, kind == LawKind::S_rq ? "theta1 = qn/(n-q alpha)" : "theta2 = qn/(n-2q alpha)");
            break;
        }
    }
}

bool slope_within_contract(double fitted, double predicted) {
    return std::abs(fitted - predicted) <= 0.05 * std::abs(predicted) + 0.02;
}

DecayFit decay_rate_fit(const DecayLaw& law, const ModelParams& params, const GridSpec& grid,
                        std::span<const double> times, const PhysicalField* test_function,
                        const MLAccuracyPolicy& policy) {
    law.check_validity(params);
    if (times.size() < 5)
        throw ParameterError("decay_rate_fit: need at least 5 times");
    for (double t : times)
        if (!resolvable(t, grid, params))
            throw ResolutionError("decay_rate_fit: t = " + std::to_string(t) +
                                  " is not resolvable (need 2h <= t^(beta/alpha) <= L/8)");
    DecayFit fit;
    fit.predicted_slope = law.predicted_slope(params);
    fit.times.assign(times.begin(), times.end());

    bool op = law.kind == LawKind::S_rq || law.kind == LawKind::T_rq;
    PhysicalField u;
    SpectralField uh;
    double unorm = 1.0;
    if (op) {
        if (test_function) {
            u = *test_function;
        } else {
            double sig = (law.p == law.q) ? grid.side_length / 10.0 : 4.0 * grid.spacing();
            u = sample(grid, [sig](std::span<const double> x) {
                double r2 = 0.0;
                for (double v : x)
                    r2 += v * v;
                return std::exp(-0.5 * r2 / (sig * sig));
            });
        }
        uh = forward(u);
        unorm = lp_norm(u, law.q);
    }
    for (double t : times) {
        double nv = 0.0;
        switch (law.kind) {
            case LawKind::P: nv = lp_norm(build_P(t, grid, params, policy), law.p); break;
            case LawKind::Y: nv = lp_norm(build_Y(t, grid, params, policy), law.p); break;
            case LawKind::gradP: nv = lp_norm(magnitude(build_grad_P(t, grid, params, policy)), law.p); break;
            case LawKind::gradY: nv = lp_norm(magnitude(build_grad_Y(t, grid, params, policy)), law.p); break;
            case LawKind::S_rq: nv = lp_norm(inverse(apply_S(uh, t, params, policy)), law.p); break;
            case LawKind::T_rq: nv = lp_norm(inverse(apply_T(uh, t, params, policy)), law.p); break;
        }
        fit.norms.push_back(nv);
        if (op)
            fit.max_prefactor = std::max(fit.max_prefactor, nv / (std::pow(t, fit.predicted_slope) * unorm));
    }
    fit.fitted_slope = fit_slope(fit.times, fit.norms);
    fit.pass = slope_within_contract(fit.fitted_slope, fit.predicted_slope);
    return fit;
}

std::string decay_table_csv(const DecayLaw& law, const DecayFit& fit, bool header) {
    std::ostringstream os;
    if (header)
        os << "law,p,q,t,norm,predicted_slope,fitted_slope\n";
    char buf[256];
    for (std::size_t i = 0; i < fit.times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", law_name(law.kind),
                      law.p, law.q, fit.times[i], fit.norms[i], fit.predicted_slope, fit.fitted_slope);
        os << buf;
    }
    return os.str();
}

}  // namespace fks
