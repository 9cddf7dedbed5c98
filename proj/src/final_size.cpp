#include "hhinfer/final_size.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hh {

InfectiousPeriodModel InfectiousPeriodModel::gamma(double shape) {
    if (!(shape > 0.0))
        throw std::domain_error("InfectiousPeriodModel: shape must be positive");
    return InfectiousPeriodModel(shape, false);
}

InfectiousPeriodModel InfectiousPeriodModel::fixed() {
    return InfectiousPeriodModel(0.0, true);
}

double InfectiousPeriodModel::mgf(double t) const {
    if (fixed_) return std::exp(t);
    if (t >= shape_)
        throw std::domain_error("mgf: argument " + std::to_string(t) +
                                " not below shape " + std::to_string(shape_));
    return std::pow(1.0 - t / shape_, -shape_);
}

double InfectiousPeriodModel::sample_period(std::mt19937_64& rng) const {
    if (fixed_) return 1.0;
    std::gamma_distribution<double> d(shape_, 1.0 / shape_);
    return d(rng);
}

double household_rate(const Theta& theta, int n) {
    if (n < 1) throw std::domain_error("household_rate: n must be >= 1");
    return theta.beta / std::pow(static_cast<double>(n), theta.eta);
}

namespace {

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (n <= 20) {
        double r = 1.0;
        for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
        return r;
    }
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

void validate_theta(const Theta& theta) {
    if (!(theta.beta >= 0.0)) throw std::domain_error("theta: beta must be >= 0");
    if (!(theta.eta >= 0.0 && theta.eta <= 1.0))
        throw std::domain_error("theta: eta must be in [0,1]");
}

}  // namespace

std::vector<double> final_size_distribution(const Theta& theta,
                                            const InfectiousPeriodModel& model, int n) {
    validate_theta(theta);
    if (n < 1 || n > kMaxContacts)
        throw std::domain_error("final_size_distribution: n outside [1," +
                                std::to_string(kMaxContacts) + "]");
    const double rate = household_rate(theta, n);
    std::vector<double> q(static_cast<size_t>(n) + 1, 0.0);
    // For each j the only new unknown is q[j]; its coefficient is
    // C(n-j,0)/phi^{1+j} = 1/phi^{1+j}.
    for (int j = 0; j <= n; ++j) {
        const double phi = model.mgf(rate * (j - n));
        double acc = 0.0;
        double phi_pow = phi;  // phi^{1+z}
        for (int z = 0; z < j; ++z) {
            acc += binom(n - z, j - z) * q[static_cast<size_t>(z)] / phi_pow;
            phi_pow *= phi;
        }
        q[static_cast<size_t>(j)] = (binom(n, j) - acc) * std::pow(phi, j + 1);
    }
    double sum = std::accumulate(q.begin(), q.end(), 0.0);
    for (double v : q) {
        if (v < -1e-9 || v > 1.0 + 1e-9 || std::abs(sum - 1.0) > 1e-9)
            throw std::runtime_error(
                "final_size_distribution: numerical instability at n=" + std::to_string(n) +
                " beta=" + std::to_string(theta.beta) + " eta=" + std::to_string(theta.eta));
    }
    for (double& v : q) v = std::clamp(v, 0.0, 1.0);
    return q;
}

FinalSizeTable final_size_table(const Theta& theta, const InfectiousPeriodModel& model,
                                int m) {
    if (m < 1 || m > kMaxContacts)
        throw std::domain_error("final_size_table: m outside [1," +
                                std::to_string(kMaxContacts) + "]");
    FinalSizeTable table;
    table.m = m;
    table.probs.reserve(static_cast<size_t>(outcome_space_size(m)));
    for (int n = 1; n <= m; ++n) {
        auto q = final_size_distribution(theta, model, n);
        table.probs.insert(table.probs.end(), q.begin(), q.end());
    }
    return table;
}

double expected_sar(const Theta& theta, const InfectiousPeriodModel& model, int n) {
    auto q = final_size_distribution(theta, model, n);
    double ez = 0.0;
    for (int z = 0; z <= n; ++z) ez += z * q[static_cast<size_t>(z)];
    return ez / n;
}

int simulate_household_outbreak(const Theta& theta, const InfectiousPeriodModel& model,
                                int n, std::mt19937_64& rng) {
    validate_theta(theta);
    if (n < 1) throw std::domain_error("simulate_household_outbreak: n must be >= 1");
    const double rate = household_rate(theta, n);
    if (rate == 0.0) return 0;
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> thresholds(static_cast<size_t>(n));
    for (auto& t : thresholds) t = expo(rng);
    std::sort(thresholds.begin(), thresholds.end());
    // Pressure on each susceptible is rate * (total infectious time so far);
    // infect susceptibles in threshold order until the pressure runs out.
    double pressure = rate * model.sample_period(rng);  // primary case
    int cases = 0;
    for (int i = 0; i < n; ++i) {
        if (thresholds[static_cast<size_t>(i)] >= pressure) break;
        ++cases;
        pressure += rate * model.sample_period(rng);
    }
    return cases;
}

}  // namespace hh
