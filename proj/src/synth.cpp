#include "hhinfer/synth.hpp"

#include <boost/math/distributions/beta.hpp>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hh {

void ContactDistribution::validate() const {
    if (m < 1 || static_cast<int>(probs.size()) != m)
        throw std::domain_error("ContactDistribution: probs length does not match m");
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw std::domain_error("ContactDistribution: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::domain_error("ContactDistribution: probabilities do not sum to 1");
}

ContactDistribution size_weight(const std::vector<double>& population) {
    if (population.empty()) throw std::domain_error("size_weight: empty distribution");
    ContactDistribution out;
    out.m = static_cast<int>(population.size());
    out.probs.resize(population.size());
    double total = 0.0;
    for (size_t i = 0; i < population.size(); ++i) {
        if (population[i] < 0.0)
            throw std::domain_error("size_weight: negative probability");
        const double size = static_cast<double>(i) + 2.0;
        out.probs[i] = size * population[i];
        total += out.probs[i];
    }
    if (total <= 0.0) throw std::domain_error("size_weight: all-zero distribution");
    for (double& p : out.probs) p /= total;
    return out;
}

HighInfoDataset generate_dataset(const ContactDistribution& dist, const Theta& theta,
                                 const InfectiousPeriodModel& model, std::int64_t households,
                                 std::mt19937_64& rng) {
    dist.validate();
    if (households < 1) throw std::domain_error("generate_dataset: need at least 1 household");
    HighInfoDataset out;
    out.m = dist.m;
    out.counts.assign(static_cast<size_t>(outcome_space_size(dist.m)), 0);
    // Final sizes come from the exact distribution by inverse CDF, not from
    // the Sellke simulator.
    std::vector<std::vector<double>> cdfs(static_cast<size_t>(dist.m));
    for (int n = 1; n <= dist.m; ++n) {
        auto q = final_size_distribution(theta, model, n);
        std::partial_sum(q.begin(), q.end(), q.begin());
        cdfs[static_cast<size_t>(n - 1)] = std::move(q);
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::int64_t h = 0; h < households; ++h) {
        double u = unif(rng);
        int n = dist.m;
        double acc = 0.0;
        for (int i = 1; i <= dist.m; ++i) {
            acc += dist.probs[static_cast<size_t>(i - 1)];
            if (u <= acc) {
                n = i;
                break;
            }
        }
        const auto& cdf = cdfs[static_cast<size_t>(n - 1)];
        const double v = unif(rng);
        int z = n;
        for (int j = 0; j <= n; ++j) {
            if (v <= cdf[static_cast<size_t>(j)]) {
                z = j;
                break;
            }
        }
        ++out.counts[static_cast<size_t>(encode(n, z, dist.m))];
    }
    return out;
}

DirichletSpec dirichlet_from_distribution(const ContactDistribution& dist, double alpha0) {
    dist.validate();
    if (!(alpha0 > 0.0))
        throw std::domain_error("dirichlet_from_distribution: alpha0 must be positive");
    DirichletSpec spec;
    spec.alpha.resize(dist.probs.size());
    // zero-probability strata get a vanishing but valid concentration
    for (size_t i = 0; i < dist.probs.size(); ++i)
        spec.alpha[i] = std::max(alpha0 * dist.probs[i], 1e-8);
    return spec;
}

namespace {

std::pair<double, double> clopper_pearson(std::int64_t covered, std::int64_t n) {
    const double k = static_cast<double>(covered);
    const double total = static_cast<double>(n);
    double lo = 0.0, hi = 1.0;
    if (covered > 0)
        lo = boost::math::quantile(boost::math::beta_distribution<>(k, total - k + 1.0),
                                   0.025);
    if (covered < n)
        hi = boost::math::quantile(boost::math::beta_distribution<>(k + 1.0, total - k),
                                   0.975);
    return {lo, hi};
}

}  // namespace

std::vector<CoverageCell> coverage_experiment(const CoverageSpec& spec) {
    spec.dist.validate();
    if (spec.replicates < 1)
        throw std::domain_error("coverage_experiment: need at least 1 replicate");
    std::vector<CoverageCell> table;
    std::uint64_t cell_index = 0;
    for (const auto& theta : spec.theta_grid) {
        for (double alpha0 : spec.alpha0_list) {
            CoverageCell cell;
            cell.theta_true = theta;
            cell.distribution = spec.distribution_name;
            cell.alpha0 = alpha0;
            cell.replicates = spec.replicates;
            const auto alpha = dirichlet_from_distribution(spec.dist, alpha0);
            for (std::int64_t r = 0; r < spec.replicates; ++r) {
                const std::uint64_t base =
                    spec.master_seed + 1000003ULL * cell_index + static_cast<std::uint64_t>(r);
                std::mt19937_64 data_rng(base ^ 0x9e3779b97f4a7c15ULL);
                auto data = generate_dataset(spec.dist, theta, spec.generator_model,
                                             spec.households_per_dataset, data_rng);
                auto low = aggregate_to_low(data);

                ChainConfig chain = spec.chain;
                chain.seed = base;
                chain.proposal.fit_eta = false;  // eta fixed to truth
                chain.init.eta = theta.eta;
                PriorSpec prior;  // improper beta, eta held by the proposal
                auto result =
                    run_chain(Dataset{low}, alpha, spec.fit_model, prior, chain);
                auto summary = summarize(result.samples);
                if (summary.beta.lo <= theta.beta && theta.beta <= summary.beta.hi)
                    ++cell.covered;
            }
            cell.coverage_pct =
                100.0 * static_cast<double>(cell.covered) / static_cast<double>(cell.replicates);
            auto [lo, hi] = clopper_pearson(cell.covered, cell.replicates);
            cell.binomial_ci_lo = lo;
            cell.binomial_ci_hi = hi;
            table.push_back(std::move(cell));
            ++cell_index;
        }
    }
    return table;
}

}  // namespace hh
