#include "hhinfer/inference.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hh {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_multivariate_beta(const std::vector<double>& x) {
    double sum = 0.0, lg = 0.0;
    for (double v : x) {
        lg += std::lgamma(v);
        sum += v;
    }
    return lg - std::lgamma(sum);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

double DirichletSpec::alpha0() const {
    return std::accumulate(alpha.begin(), alpha.end(), 0.0);
}

void DirichletSpec::validate(int m) const {
    if (static_cast<int>(alpha.size()) != m)
        throw std::domain_error("DirichletSpec: alpha length does not match m");
    for (double a : alpha)
        if (!(a > 0.0)) throw std::domain_error("DirichletSpec: alpha entries must be positive");
}

double log_likelihood(const OutcomeVector& c, const FinalSizeTable& table,
                      const DirichletSpec& alpha) {
    const int m = table.m;
    alpha.validate(m);
    if (c.size() != table.probs.size())
        throw std::domain_error("log_likelihood: structure length does not match table");

    std::int64_t total = 0;
    double log_mult = 0.0;  // log multinomial coefficient, accumulated
    double log_p = 0.0;
    std::vector<double> gamma(alpha.alpha);  // becomes N + alpha
    for (int k = 0; k < static_cast<int>(c.size()); ++k) {
        const auto ck = c[static_cast<size_t>(k)];
        if (ck < 0) throw std::domain_error("log_likelihood: negative count");
        if (ck == 0) continue;
        total += ck;
        log_mult -= std::lgamma(static_cast<double>(ck) + 1.0);
        const double pk = table.probs[static_cast<size_t>(k)];
        if (pk <= 0.0) return kNegInf;
        log_p += static_cast<double>(ck) * std::log(pk);
        gamma[static_cast<size_t>(contacts_of(k, m) - 1)] += static_cast<double>(ck);
    }
    log_mult += std::lgamma(static_cast<double>(total) + 1.0);
    return log_mult + log_p + log_multivariate_beta(gamma) -
           log_multivariate_beta(alpha.alpha);
}

double log_likelihood(const OutcomeVector& c, const Theta& theta,
                      const DirichletSpec& alpha, const InfectiousPeriodModel& model,
                      int m) {
    return log_likelihood(c, final_size_table(theta, model, m), alpha);
}

double log_prior(const Theta& theta, const PriorSpec& prior) {
    double lp = 0.0;
    if (theta.beta < 0.0) return kNegInf;
    switch (prior.beta_kind) {
        case BetaPriorKind::ImproperPositive:
            break;
        case BetaPriorKind::HalfNormal:
            lp += 0.5 * std::log(2.0 / M_PI) - std::log(prior.beta_scale) -
                  theta.beta * theta.beta / (2.0 * prior.beta_scale * prior.beta_scale);
            break;
    }
    if (theta.eta < 0.0 || theta.eta > 1.0) return kNegInf;
    switch (prior.eta_kind) {
        case EtaPriorKind::Uniform:
            break;
        case EtaPriorKind::PointMass:
            if (theta.eta != prior.eta_value) return kNegInf;
            break;
        case EtaPriorKind::EmpiricalSamples: {
            if (prior.eta_samples.empty())
                throw std::domain_error("log_prior: empirical eta prior has no samples");
            const double h = prior.eta_bandwidth;
            if (!(h > 0.0)) throw std::domain_error("log_prior: bandwidth must be positive");
            // Gaussian KDE truncated and renormalised to [0,1]
            double density = 0.0, mass = 0.0;
            for (double x : prior.eta_samples) {
                const double u = (theta.eta - x) / h;
                density += std::exp(-0.5 * u * u) / (h * std::sqrt(2.0 * M_PI));
                mass += normal_cdf((1.0 - x) / h) - normal_cdf((0.0 - x) / h);
            }
            if (density <= 0.0) return kNegInf;
            lp += std::log(density) - std::log(mass);
            break;
        }
    }
    return lp;
}

double log_target(const OutcomeVector& c, const Theta& theta, const DirichletSpec& alpha,
                  const InfectiousPeriodModel& model, const PriorSpec& prior, int m) {
    const double lp = log_prior(theta, prior);
    if (lp == kNegInf) return kNegInf;
    return log_likelihood(c, theta, alpha, model, m) + lp;
}

}  // namespace hh
