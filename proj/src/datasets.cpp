#include "hhinfer/datasets.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace hh {

std::int64_t HighInfoDataset::households() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

void HighInfoDataset::validate() const {
    if (m < 1) throw std::domain_error("HighInfoDataset: m must be >= 1");
    if (static_cast<int>(counts.size()) != outcome_space_size(m))
        throw std::domain_error("HighInfoDataset: counts length does not match m");
    for (auto c : counts)
        if (c < 0) throw std::domain_error("HighInfoDataset: negative count");
}

std::int64_t MediumInfoDataset::households() const {
    std::int64_t total = 0;
    for (int i = 1; i <= m; ++i) total += contacts_by_size[static_cast<size_t>(i - 1)] / i;
    return total;
}

void MediumInfoDataset::validate() const {
    if (m < 1) throw std::domain_error("MediumInfoDataset: m must be >= 1");
    if (static_cast<int>(contacts_by_size.size()) != m ||
        static_cast<int>(cases_by_size.size()) != m)
        throw std::domain_error("MediumInfoDataset: vector lengths do not match m");
    for (int i = 1; i <= m; ++i) {
        auto n_i = contacts_by_size[static_cast<size_t>(i - 1)];
        auto z_i = cases_by_size[static_cast<size_t>(i - 1)];
        if (n_i < 0 || z_i < 0)
            throw std::domain_error("MediumInfoDataset: negative stratum total");
        if (z_i > n_i)
            throw std::domain_error("MediumInfoDataset: stratum " + std::to_string(i) +
                                    " has more cases than contacts");
        if (n_i % i != 0)
            throw std::domain_error("MediumInfoDataset: stratum " + std::to_string(i) +
                                    " contact total " + std::to_string(n_i) +
                                    " not divisible by " + std::to_string(i));
    }
}

void LowInfoDataset::validate() const {
    if (m < 1) throw std::domain_error("LowInfoDataset: m must be >= 1");
    if (households < 0 || contacts < 0 || cases < 0)
        throw std::domain_error("LowInfoDataset: negative field");
    if (cases > contacts) throw std::domain_error("LowInfoDataset: cases exceed contacts");
    if (contacts < households)
        throw std::domain_error("LowInfoDataset: contacts " + std::to_string(contacts) +
                                " < households " + std::to_string(households));
    if (contacts > m * households)
        throw std::domain_error("LowInfoDataset: contacts " + std::to_string(contacts) +
                                " > m*N = " + std::to_string(m * households));
}

MediumInfoDataset aggregate_to_medium(const HighInfoDataset& d) {
    d.validate();
    MediumInfoDataset out;
    out.m = d.m;
    out.contacts_by_size.assign(static_cast<size_t>(d.m), 0);
    out.cases_by_size.assign(static_cast<size_t>(d.m), 0);
    for (int k = 0; k < static_cast<int>(d.counts.size()); ++k) {
        auto [n, z] = decode(k, d.m);
        out.contacts_by_size[static_cast<size_t>(n - 1)] += n * d.counts[static_cast<size_t>(k)];
        out.cases_by_size[static_cast<size_t>(n - 1)] += z * d.counts[static_cast<size_t>(k)];
    }
    return out;
}

LowInfoDataset aggregate_to_low(const HighInfoDataset& d) {
    d.validate();
    LowInfoDataset out;
    out.m = d.m;
    for (int k = 0; k < static_cast<int>(d.counts.size()); ++k) {
        auto [n, z] = decode(k, d.m);
        out.households += d.counts[static_cast<size_t>(k)];
        out.contacts += n * d.counts[static_cast<size_t>(k)];
        out.cases += z * d.counts[static_cast<size_t>(k)];
    }
    return out;
}

LowInfoDataset aggregate_to_low(const MediumInfoDataset& d) {
    d.validate();
    LowInfoDataset out;
    out.m = d.m;
    out.households = d.households();
    out.contacts = std::accumulate(d.contacts_by_size.begin(), d.contacts_by_size.end(),
                                   std::int64_t{0});
    out.cases = std::accumulate(d.cases_by_size.begin(), d.cases_by_size.end(),
                                std::int64_t{0});
    return out;
}

bool is_compatible(const OutcomeVector& c, const LowInfoDataset& d) {
    if (static_cast<int>(c.size()) != outcome_space_size(d.m))
        throw std::domain_error("is_compatible: structure length does not match m");
    std::int64_t households = 0, contacts = 0, cases = 0;
    for (int k = 0; k < static_cast<int>(c.size()); ++k) {
        if (c[static_cast<size_t>(k)] < 0) return false;
        auto [n, z] = decode(k, d.m);
        households += c[static_cast<size_t>(k)];
        contacts += n * c[static_cast<size_t>(k)];
        cases += z * c[static_cast<size_t>(k)];
    }
    return households == d.households && contacts == d.contacts && cases == d.cases;
}

bool is_compatible(const OutcomeVector& c, const MediumInfoDataset& d) {
    if (static_cast<int>(c.size()) != outcome_space_size(d.m))
        throw std::domain_error("is_compatible: structure length does not match m");
    std::vector<std::int64_t> contacts(static_cast<size_t>(d.m), 0);
    std::vector<std::int64_t> cases(static_cast<size_t>(d.m), 0);
    for (int k = 0; k < static_cast<int>(c.size()); ++k) {
        if (c[static_cast<size_t>(k)] < 0) return false;
        auto [n, z] = decode(k, d.m);
        contacts[static_cast<size_t>(n - 1)] += n * c[static_cast<size_t>(k)];
        cases[static_cast<size_t>(n - 1)] += z * c[static_cast<size_t>(k)];
    }
    return contacts == d.contacts_by_size && cases == d.cases_by_size;
}

OutcomeVector initial_structure(const LowInfoDataset& d) {
    d.validate();
    if (d.households == 0 && (d.contacts > 0 || d.cases > 0))
        throw std::domain_error("initial_structure: contacts without households");
    OutcomeVector c(static_cast<size_t>(outcome_space_size(d.m)), 0);
    if (d.households == 0) return c;
    // Spread contacts as evenly as possible, then fill cases greedily.
    const std::int64_t base = d.contacts / d.households;
    const std::int64_t extra = d.contacts % d.households;
    std::int64_t remaining_cases = d.cases;
    for (std::int64_t h = 0; h < d.households; ++h) {
        int n = static_cast<int>(base + (h < extra ? 1 : 0));
        int z = static_cast<int>(std::min<std::int64_t>(remaining_cases, n));
        remaining_cases -= z;
        ++c[static_cast<size_t>(encode(n, z, d.m))];
    }
    if (remaining_cases > 0)
        throw std::domain_error("initial_structure: cases exceed contacts");
    if (!is_compatible(c, d))
        throw std::logic_error("initial_structure: constructed structure not compatible");
    return c;
}

OutcomeVector initial_structure(const MediumInfoDataset& d) {
    d.validate();
    OutcomeVector c(static_cast<size_t>(outcome_space_size(d.m)), 0);
    for (int i = 1; i <= d.m; ++i) {
        std::int64_t n_households = d.contacts_by_size[static_cast<size_t>(i - 1)] / i;
        std::int64_t remaining_cases = d.cases_by_size[static_cast<size_t>(i - 1)];
        if (remaining_cases > n_households * i)
            throw std::domain_error("initial_structure: stratum " + std::to_string(i) +
                                    " cases exceed contacts");
        for (std::int64_t h = 0; h < n_households; ++h) {
            int z = static_cast<int>(std::min<std::int64_t>(remaining_cases, i));
            remaining_cases -= z;
            ++c[static_cast<size_t>(encode(i, z, d.m))];
        }
    }
    if (!is_compatible(c, d))
        throw std::logic_error("initial_structure: constructed structure not compatible");
    return c;
}

std::vector<std::int64_t> stratum_households(const OutcomeVector& c, int m) {
    std::vector<std::int64_t> out(static_cast<size_t>(m), 0);
    for (int k = 0; k < static_cast<int>(c.size()); ++k)
        out[static_cast<size_t>(contacts_of(k, m) - 1)] += c[static_cast<size_t>(k)];
    return out;
}

}  // namespace hh
