#pragma once

#include <memory>
#include <utility>
#include <vector>

namespace fks {

struct MLAccuracyPolicy {
    double series_cutoff = 1.0;      // Taylor region x <= series_cutoff
    double asymptotic_cutoff = 50.0; // asymptotic region x >= asymptotic_cutoff
    int max_terms = 500;
    int quad_nodes = 200;
    double target_rel_err = 1e-10;

    void validate() const;
    bool operator==(const MLAccuracyPolicy&) const = default;
};

// Order of E_{beta,gamma}. beta = 1 is accepted for gamma_param = 1 only (exp).
struct MLOrder {
    double beta;
    double gamma_param;

    void validate() const;
};

enum class MLRegion { closed_form, series, quadrature, asymptotic };

struct MLValue {
    double value;
    double error_estimate;  // absolute
    MLRegion region;
};

// Evaluates E_{beta,gamma}(-x) for x >= 0. Tables that depend only on the
// order (series coefficients, quadrature nodes) are built once here, so reuse
// an instance when evaluating many arguments. Instances are immutable and may
// be shared between threads.
class MittagLeffler {
  public:
    explicit MittagLeffler(MLOrder order, MLAccuracyPolicy policy = {});

    double operator()(double x) const { return evaluate(x).value; }
    MLValue evaluate(double x) const;

    // (1 - E_{beta,1}(-y)) / y, continuous at y = 0 where it equals
    // 1/Gamma(beta+1). Only available for gamma_param = 1.
    double complement_ratio(double y) const;

    const MLOrder& order() const { return order_; }
    const MLAccuracyPolicy& policy() const { return policy_; }

  private:
    friend class MittagLefflerPair;
    struct Nodes;

    double series(double x, bool* converged) const;
    bool asymptotic(double x, MLValue* out, double tol_factor) const;
    MLValue quadrature(double x) const;
    MLValue reduced(double x) const;

    MLOrder order_;
    MLAccuracyPolicy policy_;
    std::vector<double> series_coef_;  // 1/Gamma(beta k + gamma)
    std::vector<double> asym_logmag_;  // log|1/Gamma(gamma - beta k)|, k >= 1
    std::vector<int> asym_sign_;       // 0 where 1/Gamma vanishes
    std::shared_ptr<const Nodes> nodes_;
    std::unique_ptr<MittagLeffler> lower_;  // gamma - beta, for gamma > 1
};

// E_beta(-x) and E_{beta,beta}(-x) sharing the quadrature sweep.
class MittagLefflerPair {
  public:
    explicit MittagLefflerPair(double beta, MLAccuracyPolicy policy = {});

    std::pair<double, double> operator()(double x) const;
    const MittagLeffler& first() const { return e1_; }
    const MittagLeffler& second() const { return eb_; }

  private:
    MittagLeffler e1_;
    MittagLeffler eb_;
};

double eval_ml(MLOrder order, double x, const MLAccuracyPolicy& policy = {});

std::pair<double, double> eval_ml_pair(double beta, double x,
                                       const MLAccuracyPolicy& policy = {});

// W = int_a^b (t-s)^{beta-1} E_{beta,beta}(-(t-s)^beta lambda) ds.
double kernel_increment(double beta, double lambda, double t, double a, double b,
                        const MLAccuracyPolicy& policy = {});

// (1 - E_beta(-lambda s^beta)) / lambda, the antiderivative behind
// kernel_increment: W(a, b) = G(t - a) - G(t - b).
double kernel_primitive(const MittagLeffler& e1, double lambda, double s);

}  // namespace fks
