#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "hhinfer/enumeration.hpp"

namespace hh {

using OutcomeVector = std::vector<std::int64_t>;  // length outcome_space_size(m)

struct HighInfoDataset {
    int m = 0;
    OutcomeVector counts;

    std::int64_t households() const;
    void validate() const;
};

// Stratum totals as reported in papers: contacts_by_size[i-1] and
// cases_by_size[i-1] are the total contacts and cases in households with i
// contacts. Household counts per stratum are contacts_by_size[i-1] / i.
struct MediumInfoDataset {
    int m = 0;
    std::vector<std::int64_t> contacts_by_size;
    std::vector<std::int64_t> cases_by_size;

    std::int64_t households() const;
    void validate() const;
};

// Canonical tuple order is (households N, contacts n, cases z).
struct LowInfoDataset {
    int m = 0;
    std::int64_t households = 0;
    std::int64_t contacts = 0;
    std::int64_t cases = 0;

    void validate() const;
};

using Dataset = std::variant<LowInfoDataset, MediumInfoDataset, HighInfoDataset>;

MediumInfoDataset aggregate_to_medium(const HighInfoDataset& d);
LowInfoDataset aggregate_to_low(const HighInfoDataset& d);
LowInfoDataset aggregate_to_low(const MediumInfoDataset& d);

bool is_compatible(const OutcomeVector& c, const LowInfoDataset& d);
bool is_compatible(const OutcomeVector& c, const MediumInfoDataset& d);

// Deterministic member of the compatibility set, used to initialise chains.
OutcomeVector initial_structure(const LowInfoDataset& d);
OutcomeVector initial_structure(const MediumInfoDataset& d);

// Household count per contact-count stratum (N_1..N_m) implied by c.
std::vector<std::int64_t> stratum_households(const OutcomeVector& c, int m);

}  // namespace hh
