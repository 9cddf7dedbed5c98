#include "hhinfer/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace hh {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ---- selection-tuple machinery shared by sampling, enumeration and the
// ---- exact Hastings ratio

struct LowMove {
    int k1, s, k2;
};

struct MediumMove {
    int k1, k2;
};

int sample_discrete(const std::vector<double>& weights, double total,
                    std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng) * total;
    double acc = 0.0;
    int last = -1;
    for (int k = 0; k < static_cast<int>(weights.size()); ++k) {
        if (weights[static_cast<size_t>(k)] <= 0.0) continue;
        last = k;
        acc += weights[static_cast<size_t>(k)];
        if (u <= acc) return k;
    }
    return last;  // guard against accumulated rounding at the top end
}

// Source weights: one per household with at least 2 contacts.
std::vector<double> low_source_weights(const OutcomeVector& c, int m, double& total) {
    std::vector<double> w(c.size(), 0.0);
    total = 0.0;
    for (int k = 0; k < static_cast<int>(c.size()); ++k) {
        if (contacts_of(k, m) >= 2 && c[static_cast<size_t>(k)] > 0) {
            w[static_cast<size_t>(k)] = static_cast<double>(c[static_cast<size_t>(k)]);
            total += w[static_cast<size_t>(k)];
        }
    }
    return w;
}

// Destination weights: households with fewer than m contacts, with the
// source household removed from the pool.
std::vector<double> low_dest_weights(const OutcomeVector& c, int m, int k1,
                                     double& total) {
    std::vector<double> w(c.size(), 0.0);
    total = 0.0;
    for (int k = 0; k < static_cast<int>(c.size()); ++k) {
        if (contacts_of(k, m) > m - 1) continue;
        double cnt = static_cast<double>(c[static_cast<size_t>(k)]) - (k == k1 ? 1.0 : 0.0);
        if (cnt > 0.0) {
            w[static_cast<size_t>(k)] = cnt;
            total += cnt;
        }
    }
    return w;
}

OutcomeVector apply_low_move(const OutcomeVector& c, const LowMove& mv, int m) {
    auto [n1, z1] = decode(mv.k1, m);
    auto [n2, z2] = decode(mv.k2, m);
    OutcomeVector out = c;
    --out[static_cast<size_t>(mv.k1)];
    --out[static_cast<size_t>(mv.k2)];
    ++out[static_cast<size_t>(encode(n1 - 1, z1 - mv.s, m))];
    ++out[static_cast<size_t>(encode(n2 + 1, z2 + mv.s, m))];
    return out;
}

// Source weights for the medium move: cases in households with >= 2 contacts.
std::vector<double> medium_source_weights(const OutcomeVector& c, int m, double& total) {
    std::vector<double> w(c.size(), 0.0);
    total = 0.0;
    for (int k = 0; k < static_cast<int>(c.size()); ++k) {
        auto [n, z] = decode(k, m);
        if (n >= 2 && z >= 1 && c[static_cast<size_t>(k)] > 0) {
            w[static_cast<size_t>(k)] = static_cast<double>(c[static_cast<size_t>(k)]) * z;
            total += w[static_cast<size_t>(k)];
        }
    }
    return w;
}

// Destination weights: non-case contacts in the source stratum, with the
// source household removed from the pool.
std::vector<double> medium_dest_weights(const OutcomeVector& c, int m, int k1,
                                        double& total) {
    const int n1 = contacts_of(k1, m);
    std::vector<double> w(c.size(), 0.0);
    total = 0.0;
    for (int k = encode(n1, 0, m); k <= encode(n1, n1, m); ++k) {
        auto z = cases_of(k, m);
        double cnt = static_cast<double>(c[static_cast<size_t>(k)]) - (k == k1 ? 1.0 : 0.0);
        double weight = cnt * (n1 - z);
        if (weight > 0.0) {
            w[static_cast<size_t>(k)] = weight;
            total += weight;
        }
    }
    return w;
}

OutcomeVector apply_medium_move(const OutcomeVector& c, const MediumMove& mv, int) {
    OutcomeVector out = c;
    --out[static_cast<size_t>(mv.k1)];
    --out[static_cast<size_t>(mv.k2)];
    ++out[static_cast<size_t>(mv.k1 - 1)];
    ++out[static_cast<size_t>(mv.k2 + 1)];
    return out;
}

// Visit every selection tuple with positive probability; callback gets the
// tuple probability and the four updated indices (-1/-1/+1/+1 order).
template <typename F>
void for_each_low_tuple(const OutcomeVector& c, int m, F&& f) {
    double s1 = 0.0;
    auto p1 = low_source_weights(c, m, s1);
    if (s1 <= 0.0) return;
    for (int k1 = 0; k1 < static_cast<int>(c.size()); ++k1) {
        if (p1[static_cast<size_t>(k1)] <= 0.0) continue;
        auto [n1, z1] = decode(k1, m);
        double s2 = 0.0;
        auto p2 = low_dest_weights(c, m, k1, s2);
        if (s2 <= 0.0) continue;
        for (int s = 0; s <= 1; ++s) {
            const double ps = s == 1 ? static_cast<double>(z1) / n1
                                     : 1.0 - static_cast<double>(z1) / n1;
            if (ps <= 0.0) continue;
            for (int k2 = 0; k2 < static_cast<int>(c.size()); ++k2) {
                if (p2[static_cast<size_t>(k2)] <= 0.0) continue;
                auto [n2, z2] = decode(k2, m);
                const double prob =
                    (p1[static_cast<size_t>(k1)] / s1) * ps * (p2[static_cast<size_t>(k2)] / s2);
                f(prob, k1, k2, encode(n1 - 1, z1 - s, m), encode(n2 + 1, z2 + s, m));
            }
        }
    }
}

template <typename F>
void for_each_medium_tuple(const OutcomeVector& c, int m, F&& f) {
    double s1 = 0.0;
    auto p1 = medium_source_weights(c, m, s1);
    if (s1 <= 0.0) return;
    for (int k1 = 0; k1 < static_cast<int>(c.size()); ++k1) {
        if (p1[static_cast<size_t>(k1)] <= 0.0) continue;
        double s2 = 0.0;
        auto p2 = medium_dest_weights(c, m, k1, s2);
        if (s2 <= 0.0) continue;
        for (int k2 = 0; k2 < static_cast<int>(c.size()); ++k2) {
            if (p2[static_cast<size_t>(k2)] <= 0.0) continue;
            const double prob =
                (p1[static_cast<size_t>(k1)] / s1) * (p2[static_cast<size_t>(k2)] / s2);
            f(prob, k1, k2, k1 - 1, k2 + 1);
        }
    }
}

}  // namespace

Theta propose_theta(const ChainState& state, const ProposalConfig& config,
                    std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Theta cand = state.theta;
    cand.beta += config.sigma_beta * gauss(rng);
    if (config.fit_eta) cand.eta += config.sigma_eta * gauss(rng);
    return cand;
}

std::optional<OutcomeVector> propose_structure_low(const OutcomeVector& c, int m,
                                                   std::mt19937_64& rng) {
    double s1 = 0.0;
    auto p1 = low_source_weights(c, m, s1);
    if (s1 <= 0.0) return std::nullopt;
    const int k1 = sample_discrete(p1, s1, rng);
    auto [n1, z1] = decode(k1, m);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int s = unif(rng) <= static_cast<double>(z1) / n1 ? 1 : 0;
    double s2 = 0.0;
    auto p2 = low_dest_weights(c, m, k1, s2);
    if (s2 <= 0.0) return std::nullopt;
    const int k2 = sample_discrete(p2, s2, rng);
    return apply_low_move(c, LowMove{k1, s, k2}, m);
}

std::optional<OutcomeVector> propose_structure_medium(const OutcomeVector& c, int m,
                                                      std::mt19937_64& rng) {
    double s1 = 0.0;
    auto p1 = medium_source_weights(c, m, s1);
    if (s1 <= 0.0) return std::nullopt;
    const int k1 = sample_discrete(p1, s1, rng);
    double s2 = 0.0;
    auto p2 = medium_dest_weights(c, m, k1, s2);
    if (s2 <= 0.0) return std::nullopt;
    const int k2 = sample_discrete(p2, s2, rng);
    return apply_medium_move(c, MediumMove{k1, k2}, m);
}

double proposal_log_prob(const OutcomeVector& c_from, const OutcomeVector& c_to,
                         InfoLevel level, int m) {
    if (level == InfoLevel::High)
        throw std::domain_error("proposal_log_prob: no structure moves at high info");
    if (c_from.size() != c_to.size())
        throw std::domain_error("proposal_log_prob: size mismatch");
    const int size = static_cast<int>(c_from.size());
    std::vector<std::int64_t> diff(c_from.size());
    int nonzero = 0;
    for (int k = 0; k < size; ++k) {
        diff[static_cast<size_t>(k)] =
            c_to[static_cast<size_t>(k)] - c_from[static_cast<size_t>(k)];
        if (diff[static_cast<size_t>(k)] != 0) ++nonzero;
    }
    double total = 0.0;
    // A tuple produces c_to exactly when its net index deltas match diff.
    auto match = [&](double prob, int a, int b, int x, int y) {
        int idx[4] = {a, b, x, y};
        std::int64_t delta[4] = {-1, -1, +1, +1};
        // consolidate duplicates
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < i; ++j)
                if (idx[i] == idx[j] && delta[i] != 0) {
                    delta[j] += delta[i];
                    delta[i] = 0;
                }
        int matched = 0;
        for (int i = 0; i < 4; ++i) {
            if (delta[i] == 0) continue;
            if (diff[static_cast<size_t>(idx[i])] != delta[i]) return;
            ++matched;
        }
        if (matched != nonzero) return;
        total += prob;
    };
    if (level == InfoLevel::Low)
        for_each_low_tuple(c_from, m, match);
    else
        for_each_medium_tuple(c_from, m, match);
    return total > 0.0 ? std::log(total) : kNegInf;
}

std::vector<std::pair<OutcomeVector, double>> enumerate_proposals(const OutcomeVector& c,
                                                                  InfoLevel level, int m) {
    std::map<OutcomeVector, double> acc;
    auto visit = [&](double prob, int a, int b, int x, int y) {
        OutcomeVector cand = c;
        --cand[static_cast<size_t>(a)];
        --cand[static_cast<size_t>(b)];
        ++cand[static_cast<size_t>(x)];
        ++cand[static_cast<size_t>(y)];
        acc[cand] += prob;
    };
    if (level == InfoLevel::Low)
        for_each_low_tuple(c, m, visit);
    else if (level == InfoLevel::Medium)
        for_each_medium_tuple(c, m, visit);
    else
        throw std::domain_error("enumerate_proposals: no structure moves at high info");
    return {acc.begin(), acc.end()};
}

namespace {

// Memoises the final size table for the current theta so structure moves
// reuse it.
class TargetEvaluator {
  public:
    TargetEvaluator(const DirichletSpec& alpha, const InfectiousPeriodModel& model,
                    const PriorSpec& prior, int m)
        : alpha_(alpha), model_(model), prior_(prior), m_(m) {}

    double operator()(const OutcomeVector& c, const Theta& theta) {
        const double lp = log_prior(theta, prior_);
        if (lp == kNegInf) return kNegInf;
        if (!valid_ || theta.beta != theta_.beta || theta.eta != theta_.eta) {
            table_ = final_size_table(theta, model_, m_);
            theta_ = theta;
            valid_ = true;
        }
        return log_likelihood(c, table_, alpha_) + lp;
    }

  private:
    const DirichletSpec& alpha_;
    const InfectiousPeriodModel& model_;
    const PriorSpec& prior_;
    int m_;
    Theta theta_{};
    FinalSizeTable table_;
    bool valid_ = false;
};

struct DatasetView {
    InfoLevel level;
    int m;
};

DatasetView dataset_view(const Dataset& dataset) {
    return std::visit(
        [](const auto& d) -> DatasetView {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, LowInfoDataset>)
                return {InfoLevel::Low, d.m};
            else if constexpr (std::is_same_v<T, MediumInfoDataset>)
                return {InfoLevel::Medium, d.m};
            else
                return {InfoLevel::High, d.m};
        },
        dataset);
}

std::optional<OutcomeVector> propose_structure(const OutcomeVector& c, InfoLevel level,
                                               int m, std::mt19937_64& rng) {
    return level == InfoLevel::Low ? propose_structure_low(c, m, rng)
                                   : propose_structure_medium(c, m, rng);
}

StepRecord mh_step_impl(ChainState& state, InfoLevel level, int m,
                        TargetEvaluator& target, const ProposalConfig& config,
                        std::mt19937_64& rng, double* theta_accept_prob) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    StepRecord rec;
    const double s = level == InfoLevel::High ? 1.0 : config.s;
    if (unif(rng) < s) {
        rec.theta_move = true;
        const Theta cand = propose_theta(state, config, rng);
        const double lt = target(state.structure, cand);
        double a = 0.0;
        if (lt > kNegInf) a = std::min(1.0, std::exp(lt - state.cached_log_target));
        if (theta_accept_prob) *theta_accept_prob = a;
        if (a > 0.0 && unif(rng) < a) {
            state.theta = cand;
            state.cached_log_target = lt;
            rec.accepted = true;
        }
        return rec;
    }
    auto cand = propose_structure(state.structure, level, m, rng);
    if (!cand) {
        rec.no_move = true;
        return rec;
    }
    const double q_fwd = proposal_log_prob(state.structure, *cand, level, m);
    const double q_rev = proposal_log_prob(*cand, state.structure, level, m);
    const double lt = target(*cand, state.theta);
    if (q_fwd > kNegInf && q_rev > kNegInf && lt > kNegInf) {
        const double log_ratio = lt - state.cached_log_target + q_rev - q_fwd;
        if (log_ratio >= 0.0 || unif(rng) < std::exp(log_ratio)) {
            state.structure = std::move(*cand);
            state.cached_log_target = lt;
            rec.accepted = true;
        }
    }
    return rec;
}

}  // namespace

StepRecord mh_step(ChainState& state, const Dataset& dataset, const DirichletSpec& alpha,
                   const InfectiousPeriodModel& model, const PriorSpec& prior,
                   const ProposalConfig& config, std::mt19937_64& rng) {
    auto view = dataset_view(dataset);
    TargetEvaluator target(alpha, model, prior, view.m);
    state.cached_log_target = target(state.structure, state.theta);
    return mh_step_impl(state, view.level, view.m, target, config, rng, nullptr);
}

double ChainDiagnostics::theta_acceptance() const {
    return theta_proposed > 0
               ? static_cast<double>(theta_accepted) / static_cast<double>(theta_proposed)
               : 0.0;
}

double ChainDiagnostics::structure_acceptance() const {
    return structure_proposed > 0 ? static_cast<double>(structure_accepted) /
                                        static_cast<double>(structure_proposed)
                                  : 0.0;
}

ChainResult run_chain(const Dataset& dataset, const DirichletSpec& alpha,
                      const InfectiousPeriodModel& model, const PriorSpec& prior,
                      const ChainConfig& config) {
    const auto view = dataset_view(dataset);
    const int m = view.m;
    alpha.validate(m);
    if (config.iterations <= config.burn_in)
        throw std::domain_error("run_chain: iterations must exceed burn_in");
    if (config.thinning < 1) throw std::domain_error("run_chain: thinning must be >= 1");
    ProposalConfig prop = config.proposal;
    if (view.level == InfoLevel::High) {
        prop.s = 1.0;
    } else if (!(prop.s > 0.0 && prop.s < 1.0)) {
        throw std::domain_error("run_chain: s must be in (0,1) for low/medium data");
    }
    if (!(prop.sigma_beta > 0.0))
        throw std::domain_error("run_chain: sigma_beta must be positive");
    if (prop.fit_eta && !(prop.sigma_eta > 0.0))
        throw std::domain_error("run_chain: sigma_eta must be positive");

    ChainState state;
    state.theta = config.init;
    state.structure = std::visit(
        [](const auto& d) -> OutcomeVector {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, HighInfoDataset>) {
                d.validate();
                return d.counts;
            } else {
                return initial_structure(d);
            }
        },
        dataset);

    std::mt19937_64 rng(config.seed);
    TargetEvaluator target(alpha, model, prior, m);
    state.cached_log_target = target(state.structure, state.theta);
    if (state.cached_log_target == kNegInf)
        throw std::domain_error("run_chain: initial state has zero target density");

    ChainResult result;
    result.m = m;
    result.theta_trace.reserve(static_cast<size_t>(config.iterations));
    std::int64_t theta_moves = 0;
    for (std::int64_t it = 0; it < config.iterations; ++it) {
        double accept_prob = 0.0;
        auto rec = mh_step_impl(state, view.level, m, target, prop, rng, &accept_prob);
        if (rec.theta_move) {
            ++result.diagnostics.theta_proposed;
            if (rec.accepted) ++result.diagnostics.theta_accepted;
            ++theta_moves;
            // Robbins-Monro step towards 0.234 acceptance, burn-in only
            if (prop.adapt && it < config.burn_in) {
                const double scale =
                    std::exp(std::pow(static_cast<double>(theta_moves), -0.6) *
                             (accept_prob - 0.234));
                prop.sigma_beta *= scale;
                if (prop.fit_eta) prop.sigma_eta *= scale;
            }
        } else {
            ++result.diagnostics.structure_proposed;
            if (rec.accepted) ++result.diagnostics.structure_accepted;
            if (rec.no_move) ++result.diagnostics.structure_no_move;
        }
        result.theta_trace.push_back(state.theta);
        if (it >= config.burn_in && (it - config.burn_in) % config.thinning == 0) {
            PosteriorSample sample;
            sample.iteration = it;
            sample.theta = state.theta;
            sample.stratum_households = stratum_households(state.structure, m);
            sample.log_target = state.cached_log_target;
            result.samples.push_back(std::move(sample));
        }
    }
    result.diagnostics.final_sigma_beta = prop.sigma_beta;
    result.diagnostics.final_sigma_eta = prop.sigma_eta;
    return result;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::domain_error("quantile: empty input");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - std::floor(h)) * (values[hi] - values[lo]);
}

IntervalSummary summarize_values(const std::vector<double>& values) {
    if (values.empty()) throw std::domain_error("summarize: empty input");
    IntervalSummary s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
    s.lo = quantile(values, 0.025);
    s.hi = quantile(values, 0.975);
    return s;
}

PosteriorSummary summarize(const std::vector<PosteriorSample>& samples) {
    if (samples.empty()) throw std::domain_error("summarize: no samples");
    const auto m = samples.front().stratum_households.size();
    std::vector<double> beta, eta;
    beta.reserve(samples.size());
    eta.reserve(samples.size());
    std::vector<std::vector<double>> strata(m);
    for (const auto& s : samples) {
        beta.push_back(s.theta.beta);
        eta.push_back(s.theta.eta);
        for (size_t i = 0; i < m; ++i)
            strata[i].push_back(static_cast<double>(s.stratum_households[i]));
    }
    PosteriorSummary out;
    out.beta = summarize_values(beta);
    out.eta = summarize_values(eta);
    for (auto& v : strata) out.stratum_households.push_back(summarize_values(v));
    return out;
}

SarSummary implied_sar(const std::vector<PosteriorSample>& samples,
                       const InfectiousPeriodModel& model, int m) {
    if (samples.empty()) throw std::domain_error("implied_sar: no samples");
    std::vector<std::vector<double>> per_size(static_cast<size_t>(m));
    std::vector<double> overall;
    overall.reserve(samples.size());
    for (const auto& s : samples) {
        double num = 0.0, den = 0.0;
        for (int n = 1; n <= m; ++n) {
            const double sar = expected_sar(s.theta, model, n);
            per_size[static_cast<size_t>(n - 1)].push_back(sar);
            const double weight =
                static_cast<double>(s.stratum_households[static_cast<size_t>(n - 1)]) * n;
            num += weight * sar;
            den += weight;
        }
        overall.push_back(den > 0.0 ? num / den : 0.0);
    }
    SarSummary out;
    for (auto& v : per_size) out.per_size.push_back(summarize_values(v));
    out.overall = summarize_values(overall);
    return out;
}

BootstrapSar bootstrap_sar_ci(const HighInfoDataset& dataset, std::int64_t replicates,
                              std::mt19937_64& rng) {
    dataset.validate();
    if (replicates < 1000)
        throw std::domain_error("bootstrap_sar_ci: need at least 1000 replicates");
    // explode into one (n, z) record per household
    std::vector<std::pair<int, int>> households;
    for (int k = 0; k < static_cast<int>(dataset.counts.size()); ++k) {
        auto [n, z] = decode(k, dataset.m);
        for (std::int64_t i = 0; i < dataset.counts[static_cast<size_t>(k)]; ++i)
            households.emplace_back(n, z);
    }
    if (households.empty()) throw std::domain_error("bootstrap_sar_ci: empty dataset");

    const int m = dataset.m;
    std::vector<std::vector<double>> per_size_draws(static_cast<size_t>(m));
    std::vector<double> overall_draws;
    overall_draws.reserve(static_cast<size_t>(replicates));
    std::uniform_int_distribution<size_t> pick(0, households.size() - 1);
    std::vector<std::int64_t> contacts(static_cast<size_t>(m));
    std::vector<std::int64_t> cases(static_cast<size_t>(m));
    for (std::int64_t r = 0; r < replicates; ++r) {
        std::fill(contacts.begin(), contacts.end(), 0);
        std::fill(cases.begin(), cases.end(), 0);
        for (size_t i = 0; i < households.size(); ++i) {
            const auto& [n, z] = households[pick(rng)];
            contacts[static_cast<size_t>(n - 1)] += n;
            cases[static_cast<size_t>(n - 1)] += z;
        }
        std::int64_t tot_n = 0, tot_z = 0;
        for (int i = 0; i < m; ++i) {
            tot_n += contacts[static_cast<size_t>(i)];
            tot_z += cases[static_cast<size_t>(i)];
            if (contacts[static_cast<size_t>(i)] > 0)
                per_size_draws[static_cast<size_t>(i)].push_back(
                    static_cast<double>(cases[static_cast<size_t>(i)]) /
                    static_cast<double>(contacts[static_cast<size_t>(i)]));
        }
        overall_draws.push_back(static_cast<double>(tot_z) / static_cast<double>(tot_n));
    }

    auto observed = aggregate_to_medium(dataset);
    BootstrapSar out;
    for (int i = 0; i < m; ++i) {
        if (observed.contacts_by_size[static_cast<size_t>(i)] == 0 ||
            per_size_draws[static_cast<size_t>(i)].empty()) {
            out.per_size.push_back(std::nullopt);
            continue;
        }
        IntervalSummary s;
        s.mean = static_cast<double>(observed.cases_by_size[static_cast<size_t>(i)]) /
                 static_cast<double>(observed.contacts_by_size[static_cast<size_t>(i)]);
        s.lo = quantile(per_size_draws[static_cast<size_t>(i)], 0.025);
        s.hi = quantile(per_size_draws[static_cast<size_t>(i)], 0.975);
        out.per_size.push_back(s);
    }
    auto low = aggregate_to_low(dataset);
    IntervalSummary s;
    s.mean = static_cast<double>(low.cases) / static_cast<double>(low.contacts);
    s.lo = quantile(overall_draws, 0.025);
    s.hi = quantile(overall_draws, 0.975);
    out.overall = s;
    return out;
}

}  // namespace hh
