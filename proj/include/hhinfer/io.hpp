#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hhinfer/datasets.hpp"
#include "hhinfer/mcmc.hpp"
#include "hhinfer/synth.hpp"

namespace hh::io {

// Dataset CSV schemas (UTF-8, comma separated, LF line endings):
//   high:   contacts,cases,households
//   medium: stratum,contacts_total,cases_total[,households_by_size]
//   low:    households,contacts,cases        (single data row)
// The level is recognised from the header. For high/low files, m defaults to
// the largest contact count seen (high) and must be supplied for low files.

Dataset read_dataset(const std::filesystem::path& path, int m = 0);
InfoLevel dataset_level(const Dataset& dataset);

void write_dataset(const Dataset& dataset, const std::filesystem::path& path);

// Distribution CSV: `size,probability` rows are size-weighted into a contact
// distribution; `contacts,probability` rows are taken as-is.
ContactDistribution read_distribution(const std::filesystem::path& path);

// Single-column CSV of posterior eta samples, header `eta`.
std::vector<double> read_eta_samples(const std::filesystem::path& path);

void write_samples_csv(const std::vector<PosteriorSample>& samples, int m,
                       const std::filesystem::path& path);
void write_trace_csv(const std::vector<Theta>& trace, const std::filesystem::path& path);
void write_sar_csv(const SarSummary& sar, const std::filesystem::path& path);
void write_coverage_csv(const std::vector<CoverageCell>& table,
                        const std::filesystem::path& path);

std::vector<PosteriorSample> read_samples_csv(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace hh::io
