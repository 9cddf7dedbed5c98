// Release gate. Each check prints one PASS/FAIL line; the process exits
// nonzero if any check fails. The real-data check is skipped unless the
// study file is supplied via HHINFER_CARAZO_DATA.

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "hhinfer/io.hpp"
#include "hhinfer/mcmc.hpp"
#include "hhinfer/synth.hpp"

using namespace hh;

namespace {

const std::string kDataDir = HHINFER_DATA_DIR;

bool check1_solver_vs_simulation() {
    const std::vector<InfectiousPeriodModel> models = {
        InfectiousPeriodModel::gamma(1.0), InfectiousPeriodModel::gamma(2.0),
        InfectiousPeriodModel::fixed()};
    const std::vector<double> betas = {0.2, 0.5, 1.5, 2.0};
    const std::vector<double> etas = {0.0, 0.5, 1.0};
    const std::int64_t sims = 100000;
    std::mt19937_64 rng(20240201);

    int failures = 0;
    for (int n = 1; n <= 5; ++n)
        for (const auto& model : models)
            for (double beta : betas)
                for (double eta : etas) {
                    const Theta theta{beta, eta};
                    auto probs = final_size_distribution(theta, model, n);
                    std::vector<std::int64_t> observed(static_cast<size_t>(n) + 1, 0);
                    for (std::int64_t s = 0; s < sims; ++s)
                        ++observed[static_cast<size_t>(
                            simulate_household_outbreak(theta, model, n, rng))];

                    // pool cells with small expectation into their neighbour
                    std::vector<double> expected;
                    std::vector<double> obs;
                    for (int z = 0; z <= n; ++z) {
                        const double e = probs[static_cast<size_t>(z)] *
                                         static_cast<double>(sims);
                        const double o = static_cast<double>(observed[static_cast<size_t>(z)]);
                        if (!expected.empty() && (e < 5.0 || expected.back() < 5.0)) {
                            expected.back() += e;
                            obs.back() += o;
                        } else {
                            expected.push_back(e);
                            obs.push_back(o);
                        }
                    }
                    if (expected.size() < 2) continue;  // degenerate, nothing to test
                    double stat = 0.0;
                    for (size_t i = 0; i < expected.size(); ++i)
                        stat += (obs[i] - expected[i]) * (obs[i] - expected[i]) / expected[i];
                    boost::math::chi_squared dist(
                        static_cast<double>(expected.size() - 1));
                    if (stat > boost::math::quantile(dist, 0.999)) ++failures;
                }
    if (failures > 0)
        std::cerr << "  solver/simulation chi-squared rejected in " << failures
                  << " of 180 settings\n";
    return failures == 0;
}

bool check2_spot_value_and_attack_rate() {
    auto p = final_size_distribution({1.0, 0.7}, InfectiousPeriodModel::gamma(1.0), 1);
    if (std::abs(p[0] - 0.5) > 1e-12) {
        std::cerr << "  P(Z=0|n=1) = " << p[0] << ", expected 0.5\n";
        return false;
    }

    auto dist = io::read_distribution(kDataDir + "/uk_lfs_2023.csv");
    std::mt19937_64 rng(77);
    int inside = 0;
    for (int rep = 0; rep < 100; ++rep) {
        auto data = generate_dataset(dist, {0.2, 0.0}, InfectiousPeriodModel::gamma(2.0),
                                     1000, rng);
        auto low = aggregate_to_low(data);
        const double sar = static_cast<double>(low.cases) / static_cast<double>(low.contacts);
        if (sar > 0.199 && sar < 0.241) ++inside;
    }
    if (inside < 90) {
        std::cerr << "  attack rate inside the reference interval in only " << inside
                  << "/100 replicates\n";
        return false;
    }
    return true;
}

// all outcome vectors over m with a given household total
void all_structures(int total, int m, OutcomeVector& c, size_t cell,
                    const std::function<void(const OutcomeVector&)>& visit) {
    if (cell + 1 == c.size()) {
        c[cell] = total;
        visit(c);
        return;
    }
    for (int v = 0; v <= total; ++v) {
        c[cell] = v;
        all_structures(total - v, m, c, cell + 1, visit);
    }
}

bool check3_likelihood_against_monte_carlo() {
    std::mt19937_64 rng(5150);
    for (int instance = 0; instance < 20; ++instance) {
        const int m = 1 + static_cast<int>(rng() % 3);
        const int households = 1 + static_cast<int>(rng() % 4);
        const std::size_t cells = outcome_space_size(m);
        OutcomeVector c(cells, 0);
        for (int h = 0; h < households; ++h) ++c[rng() % cells];
        std::uniform_real_distribution<double> ub(0.1, 2.0), ua(0.5, 5.0);
        const Theta theta{ub(rng), static_cast<double>(rng() % 3) / 2.0};
        auto model = InfectiousPeriodModel::gamma(2.0);
        DirichletSpec alpha;
        for (int i = 0; i < m; ++i) alpha.alpha.push_back(ua(rng));

        const double exact = std::exp(log_likelihood(c, theta, alpha, model, m));

        // Monte-Carlo reference: average the multinomial likelihood over
        // draws of the stratum distribution from its Dirichlet prior.
        auto table = final_size_table(theta, model, m);
        double log_coeff = std::lgamma(static_cast<double>(households) + 1.0);
        for (auto v : c) log_coeff -= std::lgamma(static_cast<double>(v) + 1.0);
        const std::int64_t draws = 1000000;
        double sum = 0.0, sum_sq = 0.0;
        std::vector<std::gamma_distribution<double>> gammas;
        for (double a : alpha.alpha) gammas.emplace_back(a, 1.0);
        for (std::int64_t d = 0; d < draws; ++d) {
            std::vector<double> p(static_cast<size_t>(m));
            double tot = 0.0;
            for (int i = 0; i < m; ++i) tot += p[static_cast<size_t>(i)] = gammas[static_cast<size_t>(i)](rng);
            double log_lik = log_coeff;
            for (size_t k = 0; k < cells; ++k) {
                if (c[k] == 0) continue;
                const auto [n, z] = decode(static_cast<int>(k), m);
                const double cell_p =
                    p[static_cast<size_t>(n - 1)] / tot * table.at(n, z);
                log_lik += static_cast<double>(c[k]) * std::log(cell_p);
            }
            const double lik = std::exp(log_lik);
            sum += lik;
            sum_sq += lik * lik;
        }
        const double mc = sum / static_cast<double>(draws);
        const double var =
            (sum_sq / static_cast<double>(draws) - mc * mc) / static_cast<double>(draws);
        const double se = std::sqrt(std::max(var, 0.0));
        if (std::abs(exact - mc) > 3.0 * se + 1e-9 * (exact + mc)) {
            std::cerr << "  instance " << instance << ": exact " << exact << " vs MC "
                      << mc << " +- " << se << '\n';
            return false;
        }
    }

    // exhaustive normalisation over every outcome vector with N households
    for (int m = 1; m <= 2; ++m)
        for (int households = 1; households <= 3; ++households) {
            const Theta theta{0.7, 0.5};
            auto model = InfectiousPeriodModel::gamma(2.0);
            DirichletSpec alpha;
            for (int i = 0; i < m; ++i) alpha.alpha.push_back(1.5 + i);
            double total = 0.0;
            OutcomeVector c(outcome_space_size(m), 0);
            all_structures(households, m, c, 0, [&](const OutcomeVector& v) {
                total += std::exp(log_likelihood(v, theta, alpha, model, m));
            });
            if (std::abs(total - 1.0) > 1e-8) {
                std::cerr << "  normalisation " << total << " for m=" << m
                          << " N=" << households << '\n';
                return false;
            }
        }
    return true;
}

bool check4_structure_sampler_stationarity() {
    const int m = 3;
    LowInfoDataset low;
    low.m = m;
    low.households = 3;
    low.contacts = 5;
    low.cases = 2;
    const Theta theta{0.5, 1.0};
    auto model = InfectiousPeriodModel::gamma(2.0);
    DirichletSpec alpha{{2.0, 2.0, 2.0}};
    PriorSpec prior;

    // exhaustively enumerate the compatible set
    std::map<OutcomeVector, double> target;
    OutcomeVector scratch(outcome_space_size(m), 0);
    all_structures(static_cast<int>(low.households), m, scratch, 0,
                   [&](const OutcomeVector& v) {
                       if (is_compatible(v, low))
                           target[v] = log_likelihood(v, theta, alpha, model, m);
                   });
    double max_log = -std::numeric_limits<double>::infinity();
    for (const auto& [v, lp] : target) max_log = std::max(max_log, lp);
    double z = 0.0;
    for (auto& [v, lp] : target) z += (lp = std::exp(lp - max_log));
    for (auto& [v, lp] : target) lp /= z;

    // every state's one-move proposal distribution must be normalised
    for (const auto& [state, lp] : target) {
        double total = 0.0;
        for (const auto& [cand, q] : enumerate_proposals(state, InfoLevel::Low, m))
            total += q;
        if (std::abs(total - 1.0) > 1e-10) {
            std::cerr << "  proposal mass " << total << " from a compatible state\n";
            return false;
        }
    }

    ProposalConfig config;
    config.s = 0.0;  // structure moves only
    ChainState state;
    state.theta = theta;
    state.structure = initial_structure(low);
    state.cached_log_target = log_target(state.structure, theta, alpha, model, prior, m);
    std::mt19937_64 rng(424242);
    std::map<OutcomeVector, std::int64_t> visits;
    const std::int64_t steps = 1000000;
    for (std::int64_t i = 0; i < steps; ++i) {
        mh_step(state, Dataset{low}, alpha, model, prior, config, rng);
        ++visits[state.structure];
    }
    double tv = 0.0;
    for (const auto& [v, p] : target) {
        const double emp = visits.count(v)
                               ? static_cast<double>(visits[v]) / static_cast<double>(steps)
                               : 0.0;
        tv += std::abs(emp - p);
    }
    for (const auto& [v, n] : visits)
        if (!target.count(v)) {
            std::cerr << "  chain left the compatible set\n";
            return false;
        }
    tv /= 2.0;
    if (tv >= 0.01) {
        std::cerr << "  total variation " << tv << '\n';
        return false;
    }
    return true;
}

bool check5_interval_coverage() {
    CoverageSpec spec;
    spec.dist = io::read_distribution(kDataDir + "/uk_lfs_2023.csv");
    spec.distribution_name = "uk";
    spec.generator_model = InfectiousPeriodModel::gamma(2.0);
    spec.fit_model = InfectiousPeriodModel::gamma(2.0);
    spec.replicates = 20;
    spec.households_per_dataset = 1000;
    spec.chain.iterations = 400000;
    spec.chain.burn_in = 80000;
    spec.chain.thinning = 20;
    spec.master_seed = 90210;

    spec.theta_grid = {{0.5, 1.0}, {1.5, 0.0}, {0.5, 0.0}};
    spec.alpha0_list = {100.0};
    bool ok = true;
    for (const auto& cell : coverage_experiment(spec)) {
        if (cell.covered < 17) {
            std::cerr << "  weighted-distribution cell (" << cell.theta_true.beta << ','
                      << cell.theta_true.eta << ") covered " << cell.covered << "/20\n";
            ok = false;
        }
    }

    // a sharply split distribution breaks the weak prior and a strong one fixes it
    spec.dist = io::read_distribution(kDataDir + "/split.csv");
    spec.distribution_name = "split";
    spec.theta_grid = {{0.5, 0.0}};
    spec.alpha0_list = {100.0};
    for (const auto& cell : coverage_experiment(spec)) {
        if (cell.covered > 6) {
            std::cerr << "  split distribution, weak prior: covered " << cell.covered
                      << "/20, expected systematic failure\n";
            ok = false;
        }
    }
    // the strong prior needs much longer chains to pull the imputed
    // structure all the way back to the split composition
    spec.alpha0_list = {1000.0};
    spec.chain.iterations = 1600000;
    spec.chain.burn_in = 600000;
    spec.chain.thinning = 50;
    for (const auto& cell : coverage_experiment(spec)) {
        if (cell.covered < 17) {
            std::cerr << "  split distribution, strong prior: covered " << cell.covered
                      << "/20\n";
            ok = false;
        }
    }
    return ok;
}

bool check6_real_data_fit(bool& skipped) {
    const char* path = std::getenv("HHINFER_CARAZO_DATA");
    if (path == nullptr || std::string(path).empty()) {
        skipped = true;
        return true;
    }
    skipped = false;
    auto dataset = io::read_dataset(path);
    const int m = std::visit([](const auto& d) { return d.m; }, dataset);
    auto model = InfectiousPeriodModel::gamma(2.0);
    PriorSpec prior;  // improper beta, uniform eta

    // stratum counts are observed here, so the Dirichlet choice is inert;
    // centre it on the observed strata anyway
    OutcomeVector init = std::visit(
        [&](const auto& d) {
            if constexpr (std::is_same_v<std::decay_t<decltype(d)>, LowInfoDataset>)
                return initial_structure(d);
            else if constexpr (std::is_same_v<std::decay_t<decltype(d)>, MediumInfoDataset>)
                return initial_structure(d);
            else
                return d.counts;
        },
        dataset);
    auto strata = stratum_households(init, m);
    const double total = static_cast<double>(
        std::accumulate(strata.begin(), strata.end(), std::int64_t{0}));
    DirichletSpec alpha;
    for (auto n : strata)
        alpha.alpha.push_back(std::max(static_cast<double>(n) / total * 100.0, 1e-3));

    ChainConfig config;
    config.iterations = 200000;
    config.burn_in = 20000;
    config.thinning = 10;
    config.seed = 31337;
    auto result = run_chain(dataset, alpha, model, prior, config);
    auto summary = summarize(result.samples);
    if (std::abs(summary.beta.mean - 0.57) > 0.03 ||
        std::abs(summary.eta.mean - 0.70) > 0.03) {
        std::cerr << "  posterior means beta " << summary.beta.mean << " eta "
                  << summary.eta.mean << ", expected 0.57 / 0.70 within 0.03\n";
        return false;
    }
    return true;
}

bool check7_structural_invariants() {
    // index round trip
    for (int m : {1, 3, 5, 12})
        for (int k = 0; k < outcome_space_size(m); ++k) {
            const auto [n, z] = decode(k, m);
            if (encode(n, z, m) != k) return false;
        }

    std::mt19937_64 rng(8);
    auto dist = io::read_distribution(kDataDir + "/uk_lfs_2023.csv");
    for (int rep = 0; rep < 20; ++rep) {
        auto high = generate_dataset(dist, {0.8, 0.5}, InfectiousPeriodModel::gamma(2.0),
                                     200, rng);
        auto direct = aggregate_to_low(high);
        auto via_medium = aggregate_to_low(aggregate_to_medium(high));
        if (direct.households != via_medium.households ||
            direct.contacts != via_medium.contacts || direct.cases != via_medium.cases)
            return false;
    }

    // proposal moves never leave the compatibility set
    LowInfoDataset low{5, 40, 120, 35};
    OutcomeVector c = initial_structure(low);
    for (int i = 0; i < 10000; ++i) {
        if (auto next = propose_structure_low(c, low.m, rng)) c = *next;
        if (!is_compatible(c, low)) {
            std::cerr << "  low-information move broke compatibility at step " << i << '\n';
            return false;
        }
    }
    auto high = generate_dataset(dist, {0.8, 0.5}, InfectiousPeriodModel::gamma(2.0), 60,
                                 rng);
    auto medium = aggregate_to_medium(high);
    c = initial_structure(medium);
    for (int i = 0; i < 10000; ++i) {
        if (auto next = propose_structure_medium(c, medium.m, rng)) c = *next;
        if (!is_compatible(c, medium)) {
            std::cerr << "  stratified move broke compatibility at step " << i << '\n';
            return false;
        }
    }

    // identical seeds give identical chains
    DirichletSpec alpha = dirichlet_from_distribution(dist, 100.0);
    ChainConfig config;
    config.iterations = 3000;
    config.burn_in = 500;
    config.thinning = 5;
    config.seed = 99;
    PriorSpec prior;
    auto a = run_chain(Dataset{low}, alpha, InfectiousPeriodModel::gamma(2.0), prior, config);
    auto b = run_chain(Dataset{low}, alpha, InfectiousPeriodModel::gamma(2.0), prior, config);
    if (a.samples.size() != b.samples.size()) return false;
    for (size_t i = 0; i < a.samples.size(); ++i)
        if (a.samples[i].theta.beta != b.samples[i].theta.beta ||
            a.samples[i].theta.eta != b.samples[i].theta.eta ||
            a.samples[i].stratum_households != b.samples[i].stratum_households)
            return false;
    return true;
}

int report(int index, const char* label, bool ok, bool skipped = false) {
    std::cout << index << ". " << label << ": "
              << (skipped ? "SKIP (set HHINFER_CARAZO_DATA to run)"
                          : (ok ? "PASS" : "FAIL"))
              << std::endl;
    return ok ? 0 : 1;
}

}  // namespace

int main() {
    int failures = 0;
    failures += report(1, "exact final-size solver matches stochastic simulation",
                       check1_solver_vs_simulation());
    failures += report(2, "analytic spot value and synthetic attack rate",
                       check2_spot_value_and_attack_rate());
    failures += report(3, "marginal likelihood against Monte-Carlo integration",
                       check3_likelihood_against_monte_carlo());
    failures += report(4, "structure sampler stationarity and proposal audit",
                       check4_structure_sampler_stationarity());
    failures += report(5, "credible interval coverage on synthetic studies",
                       check5_interval_coverage());
    bool skipped = false;
    const bool ok6 = check6_real_data_fit(skipped);
    failures += report(6, "real study fit", ok6, skipped);
    failures += report(7, "structural invariants", check7_structural_invariants());
    return failures == 0 ? 0 : 1;
}
