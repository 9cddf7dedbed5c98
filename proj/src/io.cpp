#include "hhinfer/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hh::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        out.push_back(field);
    }
    return out;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty file: " + path.string());
    header = split_csv_line(line);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        rows.push_back(split_csv_line(line));
    }
    return rows;
}

std::int64_t to_int(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        auto v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("cannot parse " + what + " from '" + s + "'");
    }
}

double to_double(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("cannot parse " + what + " from '" + s + "'");
    }
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Dataset read_dataset(const std::filesystem::path& path, int m) {
    std::vector<std::string> header;
    auto rows = read_csv(path, header);
    if (header == std::vector<std::string>{"contacts", "cases", "households"}) {
        int max_n = 0;
        for (const auto& row : rows)
            max_n = std::max(max_n, static_cast<int>(to_int(row.at(0), "contacts")));
        HighInfoDataset d;
        d.m = m > 0 ? m : max_n;
        if (max_n > d.m)
            throw std::runtime_error("dataset has contacts beyond declared m");
        d.counts.assign(static_cast<size_t>(outcome_space_size(d.m)), 0);
        for (const auto& row : rows) {
            const int n = static_cast<int>(to_int(row.at(0), "contacts"));
            const int z = static_cast<int>(to_int(row.at(1), "cases"));
            d.counts[static_cast<size_t>(encode(n, z, d.m))] +=
                to_int(row.at(2), "households");
        }
        d.validate();
        return d;
    }
    if (header.size() >= 3 && header[0] == "stratum" && header[1] == "contacts_total" &&
        header[2] == "cases_total") {
        const bool has_households = header.size() > 3 && header[3] == "households_by_size";
        int max_stratum = 0;
        for (const auto& row : rows)
            max_stratum = std::max(max_stratum, static_cast<int>(to_int(row.at(0), "stratum")));
        MediumInfoDataset d;
        d.m = m > 0 ? m : max_stratum;
        if (max_stratum > d.m)
            throw std::runtime_error("dataset has strata beyond declared m");
        d.contacts_by_size.assign(static_cast<size_t>(d.m), 0);
        d.cases_by_size.assign(static_cast<size_t>(d.m), 0);
        for (const auto& row : rows) {
            const int i = static_cast<int>(to_int(row.at(0), "stratum"));
            if (i < 1 || i > d.m)
                throw std::runtime_error("stratum " + std::to_string(i) + " out of range");
            d.contacts_by_size[static_cast<size_t>(i - 1)] = to_int(row.at(1), "contacts_total");
            d.cases_by_size[static_cast<size_t>(i - 1)] = to_int(row.at(2), "cases_total");
            if (has_households && row.size() > 3 && !row[3].empty()) {
                const auto reported = to_int(row.at(3), "households_by_size");
                if (reported * i != d.contacts_by_size[static_cast<size_t>(i - 1)])
                    throw std::runtime_error(
                        "households_by_size inconsistent with contacts_total in stratum " +
                        std::to_string(i));
            }
        }
        d.validate();
        return d;
    }
    if (header == std::vector<std::string>{"households", "contacts", "cases"}) {
        if (rows.size() != 1)
            throw std::runtime_error("low-information file must have exactly one data row");
        LowInfoDataset d;
        if (m < 1)
            throw std::runtime_error("low-information dataset requires an explicit m");
        d.m = m;
        d.households = to_int(rows[0].at(0), "households");
        d.contacts = to_int(rows[0].at(1), "contacts");
        d.cases = to_int(rows[0].at(2), "cases");
        d.validate();
        return d;
    }
    throw std::runtime_error("unrecognised dataset header in " + path.string());
}

InfoLevel dataset_level(const Dataset& dataset) {
    if (std::holds_alternative<LowInfoDataset>(dataset)) return InfoLevel::Low;
    if (std::holds_alternative<MediumInfoDataset>(dataset)) return InfoLevel::Medium;
    return InfoLevel::High;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    auto out = open_out(path);
    if (const auto* d = std::get_if<HighInfoDataset>(&dataset)) {
        out << "contacts,cases,households\n";
        for (int k = 0; k < static_cast<int>(d->counts.size()); ++k) {
            if (d->counts[static_cast<size_t>(k)] == 0) continue;
            auto [n, z] = decode(k, d->m);
            out << n << ',' << z << ',' << d->counts[static_cast<size_t>(k)] << '\n';
        }
    } else if (const auto* d = std::get_if<MediumInfoDataset>(&dataset)) {
        out << "stratum,contacts_total,cases_total\n";
        for (int i = 1; i <= d->m; ++i)
            out << i << ',' << d->contacts_by_size[static_cast<size_t>(i - 1)] << ','
                << d->cases_by_size[static_cast<size_t>(i - 1)] << '\n';
    } else {
        const auto& low = std::get<LowInfoDataset>(dataset);
        out << "households,contacts,cases\n";
        out << low.households << ',' << low.contacts << ',' << low.cases << '\n';
    }
}

ContactDistribution read_distribution(const std::filesystem::path& path) {
    std::vector<std::string> header;
    auto rows = read_csv(path, header);
    if (header.size() != 2 || header[1] != "probability")
        throw std::runtime_error("distribution file needs header size,probability or "
                                 "contacts,probability");
    const bool by_size = header[0] == "size";
    if (!by_size && header[0] != "contacts")
        throw std::runtime_error("unrecognised distribution header in " + path.string());
    int max_key = 0;
    for (const auto& row : rows)
        max_key = std::max(max_key, static_cast<int>(to_int(row.at(0), header[0])));
    const int min_key = by_size ? 2 : 1;
    if (max_key < min_key)
        throw std::runtime_error("distribution file has no usable rows");
    std::vector<double> probs(static_cast<size_t>(max_key - min_key + 1), 0.0);
    for (const auto& row : rows) {
        const int key = static_cast<int>(to_int(row.at(0), header[0]));
        if (key < min_key)
            throw std::runtime_error(header[0] + " below minimum of " +
                                     std::to_string(min_key));
        probs[static_cast<size_t>(key - min_key)] = to_double(row.at(1), "probability");
    }
    if (by_size) return size_weight(probs);
    ContactDistribution dist;
    dist.m = static_cast<int>(probs.size());
    double total = 0.0;
    for (double p : probs) total += p;
    if (total <= 0.0) throw std::runtime_error("distribution sums to zero");
    for (double& p : probs) p /= total;
    dist.probs = std::move(probs);
    dist.validate();
    return dist;
}

std::vector<double> read_eta_samples(const std::filesystem::path& path) {
    std::vector<std::string> header;
    auto rows = read_csv(path, header);
    if (header != std::vector<std::string>{"eta"})
        throw std::runtime_error("eta sample file needs single column with header eta");
    std::vector<double> samples;
    samples.reserve(rows.size());
    for (const auto& row : rows) samples.push_back(to_double(row.at(0), "eta"));
    if (samples.empty()) throw std::runtime_error("eta sample file has no rows");
    return samples;
}

void write_samples_csv(const std::vector<PosteriorSample>& samples, int m,
                       const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "iteration,beta,eta,log_target";
    for (int i = 1; i <= m; ++i) out << ",N_" << i;
    out << '\n';
    for (const auto& s : samples) {
        out << s.iteration << ',' << format_double(s.theta.beta) << ','
            << format_double(s.theta.eta) << ',' << format_double(s.log_target);
        for (auto n : s.stratum_households) out << ',' << n;
        out << '\n';
    }
}

void write_trace_csv(const std::vector<Theta>& trace, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "iteration,beta,eta\n";
    for (size_t i = 0; i < trace.size(); ++i)
        out << i << ',' << format_double(trace[i].beta) << ','
            << format_double(trace[i].eta) << '\n';
}

void write_sar_csv(const SarSummary& sar, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "contacts,mean,lo,hi\n";
    for (size_t i = 0; i < sar.per_size.size(); ++i)
        out << (i + 1) << ',' << format_double(sar.per_size[i].mean) << ','
            << format_double(sar.per_size[i].lo) << ',' << format_double(sar.per_size[i].hi)
            << '\n';
    out << "overall," << format_double(sar.overall.mean) << ','
        << format_double(sar.overall.lo) << ',' << format_double(sar.overall.hi) << '\n';
}

void write_coverage_csv(const std::vector<CoverageCell>& table,
                        const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "beta_true,eta_true,distribution,alpha0,replicates,covered,coverage_pct,"
           "binomial_ci_lo,binomial_ci_hi\n";
    for (const auto& cell : table)
        out << format_double(cell.theta_true.beta) << ','
            << format_double(cell.theta_true.eta) << ',' << cell.distribution << ','
            << format_double(cell.alpha0) << ',' << cell.replicates << ',' << cell.covered
            << ',' << format_double(cell.coverage_pct) << ','
            << format_double(cell.binomial_ci_lo) << ','
            << format_double(cell.binomial_ci_hi) << '\n';
}

std::vector<PosteriorSample> read_samples_csv(const std::filesystem::path& path) {
    std::vector<std::string> header;
    auto rows = read_csv(path, header);
    if (header.size() < 4 || header[0] != "iteration" || header[1] != "beta" ||
        header[2] != "eta" || header[3] != "log_target")
        throw std::runtime_error("unrecognised samples header in " + path.string());
    std::vector<PosteriorSample> samples;
    samples.reserve(rows.size());
    for (const auto& row : rows) {
        PosteriorSample s;
        s.iteration = to_int(row.at(0), "iteration");
        s.theta.beta = to_double(row.at(1), "beta");
        s.theta.eta = to_double(row.at(2), "eta");
        s.log_target = to_double(row.at(3), "log_target");
        for (size_t i = 4; i < row.size(); ++i)
            s.stratum_households.push_back(to_int(row[i], "stratum count"));
        samples.push_back(std::move(s));
    }
    return samples;
}

}  // namespace hh::io
