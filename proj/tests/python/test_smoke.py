import math

import pytest

try:
    import hhinfer as hh
except ImportError:
    hh = pytest.importorskip("_hhinfer")


def test_enumeration_round_trip():
    assert hh.encode(1, 0, 5) == 0
    assert hh.encode(5, 5, 5) == 19
    for k in range(hh.outcome_space_size(5)):
        n, z = hh.decode(k, 5)
        assert hh.encode(n, z, 5) == k


def test_final_size_distribution():
    model = hh.InfectiousPeriodModel.gamma(1.0)
    probs = hh.final_size_distribution(hh.Theta(beta=1.0, eta=0.0), model, 1)
    assert probs[0] == pytest.approx(0.5, abs=1e-12)
    for n in range(1, 6):
        probs = hh.final_size_distribution(hh.Theta(beta=0.7, eta=0.5), model, n)
        assert sum(probs) == pytest.approx(1.0, abs=1e-10)
        assert all(p >= 0 for p in probs)


def test_mgf():
    assert hh.InfectiousPeriodModel.gamma(1.0).mgf(-1.0) == pytest.approx(0.5)
    assert hh.InfectiousPeriodModel.fixed().mgf(-1.0) == pytest.approx(math.exp(-1.0))


def test_simulation_and_aggregation():
    dist = hh.size_weight([0.5, 0.5])
    data = hh.generate_dataset(
        dist, hh.Theta(beta=0.5, eta=0.0), hh.InfectiousPeriodModel.gamma(2.0), 500, seed=3
    )
    assert data.households() == 500
    low = hh.aggregate_to_low(data)
    medium = hh.aggregate_to_medium(data)
    assert low.contacts == sum(medium.contacts_by_size)
    assert low.cases == sum(medium.cases_by_size)
    assert hh.aggregate_to_low(medium).cases == low.cases


def test_log_likelihood_finite():
    counts = [0] * hh.outcome_space_size(2)
    counts[hh.encode(2, 1, 2)] = 3
    alpha = hh.DirichletSpec([1.0, 1.0])
    ll = hh.log_likelihood(
        counts, hh.Theta(beta=0.5, eta=0.5), alpha, hh.InfectiousPeriodModel.gamma(2.0), 2
    )
    assert math.isfinite(ll)
    assert ll < 0


def test_chain_runs_and_is_deterministic():
    data = hh.LowInfoDataset(m=3, households=40, contacts=90, cases=25)
    alpha = hh.dirichlet_from_distribution(hh.ContactDistribution(3, [0.3, 0.4, 0.3]), 100.0)
    config = hh.ChainConfig()
    config.iterations = 3000
    config.burn_in = 500
    config.thinning = 5
    config.seed = 42
    prior = hh.PriorSpec()
    model = hh.InfectiousPeriodModel.gamma(2.0)

    a = hh.run_chain(data, alpha, model, prior, config)
    b = hh.run_chain(data, alpha, model, prior, config)
    assert len(a.samples) == len(b.samples) > 0
    assert all(
        x.theta.beta == y.theta.beta and x.theta.eta == y.theta.eta
        for x, y in zip(a.samples, b.samples)
    )

    summary = hh.summarize(a.samples)
    assert summary.beta.lo <= summary.beta.mean <= summary.beta.hi
    assert 0.0 <= summary.eta.mean <= 1.0
