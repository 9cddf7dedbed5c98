#include <doctest.h>

#include <cmath>
#include <random>

#include "hhinfer/synth.hpp"

using namespace hh;

TEST_CASE("size weighting") {
    auto uniform = size_weight({0.5, 0.5});  // sizes 2 and 3
    CHECK(uniform.probs[0] == doctest::Approx(0.4));
    CHECK(uniform.probs[1] == doctest::Approx(0.6));

    auto point = size_weight({0.0, 0.0, 1.0});  // all mass at size 4
    CHECK(point.probs[2] == doctest::Approx(1.0));

    // split population whose weighted contact shares are 0.67 / 0.33 and
    // whose weighted mean household size is 3.32
    const double w2 = 0.67 / 2.0, w6 = 0.33 / 6.0;
    auto split = size_weight({w2 / (w2 + w6), 0.0, 0.0, 0.0, w6 / (w2 + w6)});
    CHECK(split.probs[0] == doctest::Approx(0.67).epsilon(1e-9));
    CHECK(split.probs[4] == doctest::Approx(0.33).epsilon(1e-9));
    double mean_size = 0.0;
    for (int n = 1; n <= 5; ++n) mean_size += (n + 1) * split.probs[static_cast<size_t>(n - 1)];
    CHECK(mean_size == doctest::Approx(3.32).epsilon(1e-9));

    CHECK_THROWS_AS(size_weight({0.0, 0.0}), std::domain_error);
}

TEST_CASE("dirichlet from distribution") {
    ContactDistribution uniform{2, {0.5, 0.5}};
    auto spec = dirichlet_from_distribution(uniform, 100.0);
    CHECK(spec.alpha == std::vector<double>{50.0, 50.0});

    ContactDistribution split{5, {0.67, 0.0, 0.0, 0.0, 0.33}};
    auto strong = dirichlet_from_distribution(split, 1000.0);
    CHECK(strong.alpha[0] == doctest::Approx(670.0));
    CHECK(strong.alpha[4] == doctest::Approx(330.0));
    CHECK_THROWS_AS(dirichlet_from_distribution(split, 0.0), std::domain_error);
}

TEST_CASE("no transmission gives all-susceptible outcomes") {
    ContactDistribution dist{3, {0.2, 0.3, 0.5}};
    std::mt19937_64 rng(1);
    auto data = generate_dataset(dist, {0.0, 0.0}, InfectiousPeriodModel::gamma(2.0), 500,
                                 rng);
    CHECK(aggregate_to_low(data).cases == 0);
    CHECK(data.households() == 500);
}

TEST_CASE("generated stratum frequencies match the distribution") {
    ContactDistribution dist{3, {0.2, 0.3, 0.5}};
    std::mt19937_64 rng(2);
    const std::int64_t n = 100000;
    auto data = generate_dataset(dist, {0.7, 0.5}, InfectiousPeriodModel::gamma(2.0), n, rng);
    auto strata = stratum_households(data.counts, 3);
    for (int i = 0; i < 3; ++i) {
        const double p = dist.probs[static_cast<size_t>(i)];
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
        CHECK(std::abs(static_cast<double>(strata[static_cast<size_t>(i)]) /
                           static_cast<double>(n) -
                       p) < 3.0 * sigma);
    }
}

TEST_CASE("coverage harness is deterministic and sane on a degenerate problem") {
    CoverageSpec spec;
    spec.theta_grid = {{0.5, 1.0}};
    spec.dist = ContactDistribution{2, {0.5, 0.5}};
    spec.distribution_name = "uniform";
    spec.alpha0_list = {100.0};
    spec.replicates = 3;
    spec.households_per_dataset = 100;
    spec.chain.iterations = 8000;
    spec.chain.burn_in = 2000;
    spec.chain.thinning = 5;
    spec.master_seed = 12;

    auto a = coverage_experiment(spec);
    auto b = coverage_experiment(spec);
    REQUIRE(a.size() == 1);
    CHECK(a[0].covered == b[0].covered);
    CHECK(a[0].replicates == 3);
    CHECK(a[0].binomial_ci_lo <= a[0].coverage_pct / 100.0);
    CHECK(a[0].binomial_ci_hi >= a[0].coverage_pct / 100.0);
}
