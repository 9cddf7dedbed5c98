#pragma once

#include <vector>

#include "hhinfer/datasets.hpp"
#include "hhinfer/final_size.hpp"

namespace hh {

struct DirichletSpec {
    std::vector<double> alpha;  // one concentration per contact-count stratum 1..m

    double alpha0() const;
    void validate(int m) const;
};

enum class BetaPriorKind { ImproperPositive, HalfNormal };
enum class EtaPriorKind { Uniform, PointMass, EmpiricalSamples };

struct PriorSpec {
    BetaPriorKind beta_kind = BetaPriorKind::ImproperPositive;
    double beta_scale = 1.0;  // half-normal scale

    EtaPriorKind eta_kind = EtaPriorKind::Uniform;
    double eta_value = 1.0;  // point mass location
    std::vector<double> eta_samples;
    double eta_bandwidth = 0.05;
};

// Marginalised likelihood: multinomial coefficient times product of final
// size probabilities times the Dirichlet marginal B(N+alpha)/B(alpha),
// where N_i are the stratum household counts of c.
double log_likelihood(const OutcomeVector& c, const Theta& theta,
                      const DirichletSpec& alpha, const InfectiousPeriodModel& model,
                      int m);

// Same, with the final size table supplied by the caller (hot path for MCMC,
// where structure moves keep theta fixed).
double log_likelihood(const OutcomeVector& c, const FinalSizeTable& table,
                      const DirichletSpec& alpha);

double log_prior(const Theta& theta, const PriorSpec& prior);

double log_target(const OutcomeVector& c, const Theta& theta, const DirichletSpec& alpha,
                  const InfectiousPeriodModel& model, const PriorSpec& prior, int m);

}  // namespace hh
