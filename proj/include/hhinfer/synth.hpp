#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hhinfer/datasets.hpp"
#include "hhinfer/final_size.hpp"
#include "hhinfer/inference.hpp"
#include "hhinfer/mcmc.hpp"

namespace hh {

// Distribution over contact counts 1..m seen by the study (households are
// size-weighted: larger households are likelier to contain an index case).
struct ContactDistribution {
    int m = 0;
    std::vector<double> probs;  // index i -> P(contacts = i+1)

    void validate() const;
};

// population[i] = P(household size = i+2); weight by size, shift to contacts.
ContactDistribution size_weight(const std::vector<double>& population);

HighInfoDataset generate_dataset(const ContactDistribution& dist, const Theta& theta,
                                 const InfectiousPeriodModel& model, std::int64_t households,
                                 std::mt19937_64& rng);

DirichletSpec dirichlet_from_distribution(const ContactDistribution& dist, double alpha0);

struct CoverageCell {
    Theta theta_true;
    std::string distribution;
    double alpha0 = 0.0;
    std::int64_t replicates = 0;
    std::int64_t covered = 0;
    double coverage_pct = 0.0;
    double binomial_ci_lo = 0.0;  // exact (Clopper-Pearson) 95% interval
    double binomial_ci_hi = 0.0;
};

struct CoverageSpec {
    std::vector<Theta> theta_grid;
    ContactDistribution dist;
    std::string distribution_name = "custom";
    InfectiousPeriodModel generator_model = InfectiousPeriodModel::gamma(2.0);
    InfectiousPeriodModel fit_model = InfectiousPeriodModel::gamma(2.0);
    std::vector<double> alpha0_list{100.0};
    std::int64_t replicates = 20;
    std::int64_t households_per_dataset = 1000;
    ChainConfig chain;
    std::uint64_t master_seed = 1;
};

// Fig.-2-style harness: generate replicate datasets, reduce to low info, fit
// beta with eta fixed to truth, report 95%-interval coverage per cell.
// Replicate r of cell i uses seed master_seed + 1000003 * i + r.
std::vector<CoverageCell> coverage_experiment(const CoverageSpec& spec);

}  // namespace hh
