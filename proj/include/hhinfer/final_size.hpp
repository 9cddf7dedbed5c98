#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hhinfer/enumeration.hpp"

namespace hh {

inline constexpr int kMaxContacts = 20;

struct Theta {
    double beta = 0.5;  // base transmission rate, per mean infectious period
    double eta = 0.5;   // density-mixing exponent in [0,1]
};

// Infectious period I ~ Gamma(a,a), so E[I] = 1 for every shape; the
// distinguished infinite-shape case is the fixed period I = 1.
class InfectiousPeriodModel {
  public:
    static InfectiousPeriodModel gamma(double shape);
    static InfectiousPeriodModel fixed();

    bool is_fixed() const { return fixed_; }
    double shape() const { return shape_; }

    // E[exp(tI)] for t <= 0
    double mgf(double t) const;

    double sample_period(std::mt19937_64& rng) const;

  private:
    InfectiousPeriodModel(double shape, bool fixed) : shape_(shape), fixed_(fixed) {}
    double shape_;
    bool fixed_;
};

struct FinalSizeTable {
    int m = 0;
    std::vector<double> probs;  // probs[k] = P(Z = f_z(k) | f_n(k), theta)

    double at(int n, int z) const { return probs[static_cast<size_t>(encode(n, z, m))]; }
};

// Per-pair contact rate beta / n^eta
double household_rate(const Theta& theta, int n);

// Exact distribution of the household final size Z given n initial
// susceptibles, by forward substitution through the triangular system.
std::vector<double> final_size_distribution(const Theta& theta,
                                            const InfectiousPeriodModel& model, int n);

FinalSizeTable final_size_table(const Theta& theta, const InfectiousPeriodModel& model,
                                int m);

// E[Z | n, theta] / n
double expected_sar(const Theta& theta, const InfectiousPeriodModel& model, int n);

// Sellke-construction simulation of one household outbreak; returns the
// number of non-primary cases. Independent oracle for the exact solver.
int simulate_household_outbreak(const Theta& theta, const InfectiousPeriodModel& model,
                                int n, std::mt19937_64& rng);

}  // namespace hh
