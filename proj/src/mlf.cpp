#include "fks/mlf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fks/errors.hpp"

namespace fks {

namespace {

constexpr double pi = std::numbers::pi;

// Half width of the tanh-sinh window in the u variable.
constexpr double kWindow = 3.0;

// The asymptotic series is tried below asymptotic_cutoff once x^{1/beta}
// exceeds this; its smallest term is then of order exp(-x^{1/beta}).
constexpr double kAsymptoticProbe = 20.0;

double recip_gamma(double g) {
    double k = std::round(g);
    if (k <= 0.0 && std::abs(g - k) < 1e-13)
        return 0.0;
    if (g > 171.0)
        return 0.0;
    return 1.0 / std::tgamma(g);
}

// log|1/Gamma(g)| and its sign, valid for large negative g.
void log_recip_gamma(double g, double* logmag, int* sign) {
    double k = std::round(g);
    if (k <= 0.0 && std::abs(g - k) < 1e-13) {
        *logmag = -std::numeric_limits<double>::infinity();
        *sign = 0;
        return;
    }
    if (g > 0.0) {
        int s = 1;
        *logmag = -lgamma_r(g, &s);
        *sign = s;
        return;
    }
    // 1/Gamma(g) = sin(pi g) Gamma(1-g) / pi
    double frac = g - k;
    double sp = std::sin(pi * frac);
    if (static_cast<long long>(k) % 2 != 0)
        sp = -sp;
    int s = 1;
    *logmag = lgamma_r(1.0 - g, &s) + std::log(std::abs(sp)) - std::log(pi);
    *sign = sp > 0 ? 1 : -1;
}

}  // namespace

void MLAccuracyPolicy::validate() const {
    if (!(series_cutoff > 0.0) || !(series_cutoff <= asymptotic_cutoff))
        throw ParameterError("MLAccuracyPolicy: need 0 < series_cutoff <= asymptotic_cutoff");
    if (max_terms < 1)
        throw ParameterError("MLAccuracyPolicy: max_terms must be >= 1");
    if (quad_nodes < 2)
        throw ParameterError("MLAccuracyPolicy: quad_nodes must be >= 2");
    if (!(target_rel_err > 0.0))
        throw ParameterError("MLAccuracyPolicy: target_rel_err must be > 0");
}

void MLOrder::validate() const {
    if (!(beta > 0.0 && beta <= 1.0))
        throw ParameterError("MLOrder: beta must lie in (0, 1], got " + std::to_string(beta));
    if (!(gamma_param > 0.0) || !std::isfinite(gamma_param))
        throw ParameterError("MLOrder: gamma_param must be > 0");
    if (beta == 1.0 && gamma_param != 1.0)
        throw ParameterError("MLOrder: beta = 1 is supported for gamma_param = 1 only");
}

// Tanh-sinh nodes on theta in (-phi, phi), phi = beta pi / 2, mapped to the
// radial variable r(theta) = s^{1/beta}, s = sin(phi + theta) / sin(phi - theta).
// Weights include the 1/(beta pi) normalisation.
struct MittagLeffler::Nodes {
    std::vector<double> r;
    std::vector<double> w;
    std::vector<double> w_half;  // every other node, doubled; for the error estimate

    Nodes(double beta, int n) {
        const double phi = 0.5 * beta * pi;
        const double h = 2.0 * kWindow / (n - 1);
        r.resize(n);
        w.resize(n);
        w_half.assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double u = -kWindow + i * h;
            double sh = std::sinh(u);
            double ch = std::cosh(u);
            double e = std::exp(-pi * std::abs(sh));
            double delta = phi * 2.0 * e / (1.0 + e);  // distance to the nearest end
            double c = std::cosh(0.5 * pi * sh);
            double dtheta = phi * 0.5 * pi * ch / (c * c);
            double ratio = std::sin(delta) / std::sin(2.0 * phi - delta);
            double logs = std::log(ratio);
            if (u > 0)
                logs = -logs;
            r[i] = std::exp(logs / beta);
            w[i] = h * dtheta / (beta * pi);
            if (i % 2 == 0)
                w_half[i] = 2.0 * w[i];
        }
    }
};

MittagLeffler::MittagLeffler(MLOrder order, MLAccuracyPolicy policy)
    : order_(order), policy_(policy) {
    order_.validate();
    policy_.validate();
    const double b = order_.beta;
    const double g = order_.gamma_param;
    series_coef_.resize(policy_.max_terms + 1);
    for (int k = 0; k <= policy_.max_terms; ++k)
        series_coef_[k] = recip_gamma(b * k + g);
    if (b == 1.0)
        return;
    asym_logmag_.resize(policy_.max_terms + 1);
    asym_sign_.resize(policy_.max_terms + 1);
    for (int k = 1; k <= policy_.max_terms; ++k)
        log_recip_gamma(g - b * k, &asym_logmag_[k], &asym_sign_[k]);
    nodes_ = std::make_shared<const Nodes>(b, policy_.quad_nodes);
    // For gamma > 1 the density has an r^{1-gamma} endpoint singularity;
    // step down with the recurrence instead.
    if (g > 1.0)
        lower_ = std::make_unique<MittagLeffler>(MLOrder{b, g - b}, policy_);
}

double MittagLeffler::series(double x, bool* converged) const {
    const double tol = policy_.target_rel_err * 1e-3;
    double sum = series_coef_[0];
    double p = 1.0;
    *converged = false;
    for (int k = 1; k <= policy_.max_terms; ++k) {
        p *= -x;
        double term = p * series_coef_[k];
        sum += term;
        if (std::abs(term) <= tol * std::abs(sum) || series_coef_[k] == 0.0) {
            *converged = true;
            break;
        }
    }
    return sum;
}

bool MittagLeffler::asymptotic(double x, MLValue* out, double tol_factor) const {
    const double lx = std::log(x);
    const double tol = std::numeric_limits<double>::epsilon() * 0.1;
    const double b = order_.beta;
    const double g = order_.gamma_param;
    double sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    double err = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= policy_.max_terms; ++k) {
        // Stopping and divergence use the envelope Gamma(1 - z) / (pi x^k) of
        // 1/Gamma(z) x^{-k}, so a term that is small only because z sits
        // near a pole does not end the sum early.
        const double z = g - b * k;
        double env = z < 0.5 ? std::exp(std::lgamma(1.0 - z) - k * lx) / pi
                             : std::exp(asym_logmag_[k] - k * lx);
        if (env > prev) {
            err = prev;
            break;
        }
        if (asym_sign_[k] != 0)
            sum += (k % 2 == 1 ? 1.0 : -1.0) * asym_sign_[k] * std::exp(asym_logmag_[k] - k * lx);
        prev = env;
        err = env;
        if (env <= tol * std::abs(sum))
            break;
    }
    out->value = sum;
    out->error_estimate = err;
    out->region = MLRegion::asymptotic;
    return err <= tol_factor * policy_.target_rel_err * std::abs(sum) && sum > 0.0;
}

MLValue MittagLeffler::quadrature(double x) const {
    const double b = order_.beta;
    const double g = order_.gamma_param;
    const double t = std::exp(std::log(x) / b);
    const auto& nd = *nodes_;
    const int n = static_cast<int>(nd.r.size());
    double s_full = 0.0;
    double s_half = 0.0;
    double pre = 1.0;
    if (g == 1.0) {
        for (int i = 0; i < n; ++i) {
            double rt = nd.r[i] * t;
            if (rt > 745.0)
                continue;
            double f = std::exp(-rt);
            s_full += nd.w[i] * f;
            s_half += nd.w_half[i] * f;
        }
    } else if (g == b) {
        for (int i = 0; i < n; ++i) {
            double rt = nd.r[i] * t;
            if (rt > 745.0)
                continue;
            double f = nd.r[i] * std::exp(-rt);
            s_full += nd.w[i] * f;
            s_half += nd.w_half[i] * f;
        }
        pre = std::pow(t, 1.0 - b);
    } else {
        const double sg = std::sin(g * pi);
        const double sgb = std::sin((g - b) * pi);
        for (int i = 0; i < n; ++i) {
            double rt = nd.r[i] * t;
            if (rt > 745.0)
                continue;
            double r = nd.r[i];
            double f = std::exp(-rt) * std::pow(r, 1.0 - g) * (std::pow(r, b) * sg + sgb);
            s_full += nd.w[i] * f;
            s_half += nd.w_half[i] * f;
        }
        pre = std::pow(t, 1.0 - g) / std::sin(b * pi);
    }
    double v = pre * s_full;
    // Double-exponential rules roughly square their error when the step
    // halves, so |I_h - I_2h|^2 / |I| estimates the error of I_h.
    double d = pre * std::abs(s_full - s_half);
    double est = std::max(d * d / std::max(std::abs(v), 1e-300),
                          std::abs(v) * std::numeric_limits<double>::epsilon());
    return {v, est, MLRegion::quadrature};
}

// E_{b,g}(-x) = (1/Gamma(g-b) - E_{b,g-b}(-x)) / x
MLValue MittagLeffler::reduced(double x) const {
    MLValue lo = lower_->evaluate(x);
    double c = recip_gamma(order_.gamma_param - order_.beta);
    return {(c - lo.value) / x, lo.error_estimate / x, lo.region};
}

MLValue MittagLeffler::evaluate(double x) const {
    if (!(x >= 0.0) || !std::isfinite(x))
        throw ParameterError("eval_ml: x must be finite and >= 0");
    if (order_.beta == 1.0)
        return {std::exp(-x), 0.0, MLRegion::closed_form};
    if (x == 0.0)
        return {series_coef_[0], 0.0, MLRegion::series};
    const double target = policy_.target_rel_err;
    if (x <= policy_.series_cutoff) {
        bool ok = false;
        double v = series(x, &ok);
        if (ok)
            return {v, std::abs(v) * target * 1e-3, MLRegion::series};
    }
    MLValue asym{0.0, std::numeric_limits<double>::infinity(), MLRegion::asymptotic};
    bool forced = x >= policy_.asymptotic_cutoff;
    // Below the cutoff the quadrature is the default; the asymptotic series is
    // only taken when it is far more accurate than the target.
    if (forced || std::log(x) / order_.beta >= std::log(kAsymptoticProbe)) {
        if (asymptotic(x, &asym, forced ? 1.0 : 1e-4))
            return asym;
    }
    MLValue q = lower_ ? reduced(x) : quadrature(x);
    if (q.error_estimate <= target * std::max(std::abs(q.value), 1e-300))
        return q;
    const MLValue& best = asym.error_estimate < q.error_estimate ? asym : q;
    throw AccuracyError("eval_ml: no region reached the target at x = " + std::to_string(x),
                        best.error_estimate / std::max(std::abs(best.value), 1e-300));
}

double MittagLeffler::complement_ratio(double y) const {
    if (order_.gamma_param != 1.0)
        throw ParameterError("complement_ratio requires gamma_param = 1");
    if (!(y >= 0.0))
        throw ParameterError("complement_ratio: y must be >= 0");
    if (order_.beta == 1.0)
        return y == 0.0 ? 1.0 : -std::expm1(-y) / y;
    if (y <= policy_.series_cutoff) {
        const double tol = policy_.target_rel_err * 1e-3;
        double sum = series_coef_[1];
        double p = 1.0;
        bool ok = false;
        for (int k = 2; k <= policy_.max_terms; ++k) {
            p *= -y;
            double term = p * series_coef_[k];
            sum += term;
            if (std::abs(term) <= tol * std::abs(sum) || series_coef_[k] == 0.0) {
                ok = true;
                break;
            }
        }
        if (ok)
            return sum;
    }
    return (1.0 - evaluate(y).value) / y;
}

MittagLefflerPair::MittagLefflerPair(double beta, MLAccuracyPolicy policy)
    : e1_(MLOrder{beta, 1.0}, policy), eb_(MLOrder{beta, beta}, policy) {}

std::pair<double, double> MittagLefflerPair::operator()(double x) const {
    const auto& p = e1_.policy();
    if (e1_.order().beta == 1.0 || x <= p.series_cutoff || x >= p.asymptotic_cutoff)
        return {e1_(x), eb_(x)};
    MLValue a{}, b{};
    if (e1_.asymptotic(x, &a, 1e-4) && eb_.asymptotic(x, &b, 1e-4))
        return {a.value, b.value};
    // Shared sweep: both integrands use the same nodes and exp(-r t).
    const double beta = e1_.order().beta;
    const double t = std::exp(std::log(x) / beta);
    const auto& nd = *e1_.nodes_;
    double s1 = 0.0, s1h = 0.0, s2 = 0.0, s2h = 0.0;
    for (std::size_t i = 0; i < nd.r.size(); ++i) {
        double rt = nd.r[i] * t;
        if (rt > 745.0)
            continue;
        double f = std::exp(-rt);
        s1 += nd.w[i] * f;
        s1h += nd.w_half[i] * f;
        s2 += nd.w[i] * nd.r[i] * f;
        s2h += nd.w_half[i] * nd.r[i] * f;
    }
    double pre = std::pow(t, 1.0 - beta);
    double v1 = s1, v2 = pre * s2;
    double d1 = std::abs(s1 - s1h), d2 = pre * std::abs(s2 - s2h);
    double tol = p.target_rel_err;
    if (d1 * d1 > tol * v1 * v1 || d2 * d2 > tol * v2 * v2)
        return {e1_(x), eb_(x)};  // falls through to the checked path
    return {v1, v2};
}

namespace {

const MittagLeffler& cached(MLOrder order, const MLAccuracyPolicy& policy) {
    struct Entry {
        double beta, gamma;
        MLAccuracyPolicy policy;
        std::unique_ptr<MittagLeffler> ml;
    };
    thread_local std::vector<Entry> cache;
    for (auto& e : cache)
        if (e.beta == order.beta && e.gamma == order.gamma_param && e.policy == policy)
            return *e.ml;
    auto ml = std::make_unique<MittagLeffler>(order, policy);
    if (cache.size() >= 8)
        cache.erase(cache.begin());
    cache.push_back({order.beta, order.gamma_param, policy, std::move(ml)});
    return *cache.back().ml;
}

}  // namespace

double eval_ml(MLOrder order, double x, const MLAccuracyPolicy& policy) {
    order.validate();
    return cached(order, policy)(x);
}

std::pair<double, double> eval_ml_pair(double beta, double x, const MLAccuracyPolicy& policy) {
    MLOrder o1{beta, 1.0};
    o1.validate();
    return {cached(o1, policy)(x), cached(MLOrder{beta, beta}, policy)(x)};
}

double kernel_primitive(const MittagLeffler& e1, double lambda, double s) {
    if (s <= 0.0)
        return 0.0;
    double sb = std::pow(s, e1.order().beta);
    return sb * e1.complement_ratio(lambda * sb);
}

double kernel_increment(double beta, double lambda, double t, double a, double b,
                        const MLAccuracyPolicy& policy) {
    MLOrder o{beta, 1.0};
    o.validate();
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw ParameterError("kernel_increment: lambda must be finite and >= 0");
    if (!(t > 0.0))
        throw ParameterError("kernel_increment: t must be > 0");
    if (!(a >= 0.0 && a < b && b <= t))
        throw ParameterError("kernel_increment: need 0 <= a < b <= t");
    const auto& e1 = cached(o, policy);
    return kernel_primitive(e1, lambda, t - a) - kernel_primitive(e1, lambda, t - b);
}

}  // namespace fks
