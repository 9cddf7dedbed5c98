#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hhinfer/datasets.hpp"
#include "hhinfer/inference.hpp"

namespace hh {

enum class InfoLevel { Low, Medium, High };

struct ProposalConfig {
    double s = 0.2;  // probability of a theta move per iteration
    double sigma_beta = 0.05;
    double sigma_eta = 0.05;
    bool fit_eta = true;
    bool adapt = true;  // Robbins-Monro scaling of sigma during burn-in only
};

struct ChainConfig {
    std::int64_t iterations = 200000;
    std::int64_t burn_in = 20000;
    std::int64_t thinning = 10;
    std::uint64_t seed = 1;
    Theta init{0.5, 0.5};
    ProposalConfig proposal;
};

struct ChainState {
    Theta theta;
    OutcomeVector structure;
    double cached_log_target = 0.0;
};

struct PosteriorSample {
    std::int64_t iteration = 0;
    Theta theta;
    std::vector<std::int64_t> stratum_households;  // N_1..N_m
    double log_target = 0.0;
};

struct ChainDiagnostics {
    std::int64_t theta_proposed = 0, theta_accepted = 0;
    std::int64_t structure_proposed = 0, structure_accepted = 0;
    std::int64_t structure_no_move = 0;
    double final_sigma_beta = 0.0, final_sigma_eta = 0.0;

    double theta_acceptance() const;
    double structure_acceptance() const;
};

struct ChainResult {
    std::vector<PosteriorSample> samples;
    std::vector<Theta> theta_trace;  // every iteration, for diagnostics
    ChainDiagnostics diagnostics;
    int m = 0;
};

// Symmetric Gaussian theta proposal; eta is held fixed when fit_eta is off.
Theta propose_theta(const ChainState& state, const ProposalConfig& config,
                    std::mt19937_64& rng);

// Single structure move; returns nothing when the move's preconditions fail.
std::optional<OutcomeVector> propose_structure_low(const OutcomeVector& c, int m,
                                                   std::mt19937_64& rng);
std::optional<OutcomeVector> propose_structure_medium(const OutcomeVector& c, int m,
                                                      std::mt19937_64& rng);

// Exact log of the total probability that the level's proposal algorithm
// emits c_to from c_from, summed over every selection tuple. -inf when
// unreachable in one move.
double proposal_log_prob(const OutcomeVector& c_from, const OutcomeVector& c_to,
                         InfoLevel level, int m);

// All candidates reachable in one move from c with their probabilities;
// test/audit surface (total probability sums to 1 minus the no-move mass).
std::vector<std::pair<OutcomeVector, double>> enumerate_proposals(const OutcomeVector& c,
                                                                  InfoLevel level, int m);

struct StepRecord {
    bool theta_move = false;
    bool accepted = false;
    bool no_move = false;
};

StepRecord mh_step(ChainState& state, const Dataset& dataset, const DirichletSpec& alpha,
                   const InfectiousPeriodModel& model, const PriorSpec& prior,
                   const ProposalConfig& config, std::mt19937_64& rng);

ChainResult run_chain(const Dataset& dataset, const DirichletSpec& alpha,
                      const InfectiousPeriodModel& model, const PriorSpec& prior,
                      const ChainConfig& config);

struct IntervalSummary {
    double mean = 0.0;
    double lo = 0.0;  // 2.5% quantile
    double hi = 0.0;  // 97.5% quantile
};

struct PosteriorSummary {
    IntervalSummary beta;
    IntervalSummary eta;
    std::vector<IntervalSummary> stratum_households;
};

// Equal-tailed interval via linear interpolation of order statistics.
double quantile(std::vector<double> values, double p);
IntervalSummary summarize_values(const std::vector<double>& values);
PosteriorSummary summarize(const std::vector<PosteriorSample>& samples);

struct SarSummary {
    std::vector<IntervalSummary> per_size;  // n = 1..m
    IntervalSummary overall;
};

SarSummary implied_sar(const std::vector<PosteriorSample>& samples,
                       const InfectiousPeriodModel& model, int m);

struct BootstrapSar {
    std::vector<std::optional<IntervalSummary>> per_size;  // absent for empty strata
    std::optional<IntervalSummary> overall;
};

BootstrapSar bootstrap_sar_ci(const HighInfoDataset& dataset, std::int64_t replicates,
                              std::mt19937_64& rng);

}  // namespace hh
