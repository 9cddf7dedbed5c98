// Command line front end: fit, simulate, aggregate, validate-coverage,
// summarize. File schemas are documented in the README.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "hhinfer/io.hpp"
#include "hhinfer/mcmc.hpp"
#include "hhinfer/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunOptions {
    std::string dataset_path;
    int m = 5;
    std::string model = "2";  // gamma shape, or "fixed"
    std::string distribution_path;
    double alpha0 = 200.0;
    std::string beta_prior = "improper";
    double beta_scale = 1.0;
    std::string eta_prior = "uniform";
    double eta_value = 1.0;
    std::string eta_samples_path;
    double eta_bandwidth = 0.05;
    bool fit_eta = true;
    double s = 0.2;
    double sigma_beta = 0.05;
    double sigma_eta = 0.05;
    bool no_adapt = false;
    std::int64_t iterations = 200000;
    std::int64_t burn_in = 20000;
    std::int64_t thinning = 10;
    std::uint64_t seed = 1;
    double init_beta = 0.5;
    double init_eta = 0.5;
    int chains = 1;
    std::string output_dir = ".";
    std::string config_path;
    std::string batch_path;
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("HHINFER_SEED")) {
        return static_cast<std::uint64_t>(std::stoull(env));
    }
    return 1;
}

hh::InfectiousPeriodModel parse_model(const std::string& text) {
    if (text == "fixed" || text == "inf") return hh::InfectiousPeriodModel::fixed();
    return hh::InfectiousPeriodModel::gamma(std::stod(text));
}

void apply_config_file(RunOptions& opt, const CLI::App* cmd) {
    if (opt.config_path.empty()) return;
    std::size_t explicit_flags = 0;
    for (const auto* o : cmd->get_options())
        if (o->count() > 0 && o->get_name() != "--config") ++explicit_flags;
    if (explicit_flags > 0)
        std::cerr << "warning: --config given, file settings override command line flags\n";
    std::ifstream in(opt.config_path);
    if (!in) throw std::runtime_error("cannot open config file " + opt.config_path);
    json cfg = json::parse(in);
    auto get = [&](const char* key, auto& field) {
        if (cfg.contains(key)) field = cfg[key].get<std::decay_t<decltype(field)>>();
    };
    get("dataset", opt.dataset_path);
    get("m", opt.m);
    get("model", opt.model);
    get("distribution", opt.distribution_path);
    get("alpha0", opt.alpha0);
    get("beta_prior", opt.beta_prior);
    get("beta_scale", opt.beta_scale);
    get("eta_prior", opt.eta_prior);
    get("eta_value", opt.eta_value);
    get("eta_samples", opt.eta_samples_path);
    get("eta_bandwidth", opt.eta_bandwidth);
    get("fit_eta", opt.fit_eta);
    get("s", opt.s);
    get("sigma_beta", opt.sigma_beta);
    get("sigma_eta", opt.sigma_eta);
    get("iterations", opt.iterations);
    get("burn_in", opt.burn_in);
    get("thinning", opt.thinning);
    get("seed", opt.seed);
    get("init_beta", opt.init_beta);
    get("init_eta", opt.init_eta);
    get("chains", opt.chains);
    get("output_dir", opt.output_dir);
}

hh::PriorSpec build_prior(const RunOptions& opt) {
    hh::PriorSpec prior;
    if (opt.beta_prior == "improper") {
        prior.beta_kind = hh::BetaPriorKind::ImproperPositive;
    } else if (opt.beta_prior == "halfnormal") {
        prior.beta_kind = hh::BetaPriorKind::HalfNormal;
        prior.beta_scale = opt.beta_scale;
    } else {
        throw std::runtime_error("unknown beta prior '" + opt.beta_prior + "'");
    }
    if (opt.eta_prior == "uniform") {
        prior.eta_kind = hh::EtaPriorKind::Uniform;
    } else if (opt.eta_prior == "fixed") {
        prior.eta_kind = hh::EtaPriorKind::PointMass;
        prior.eta_value = opt.eta_value;
    } else if (opt.eta_prior == "empirical") {
        prior.eta_kind = hh::EtaPriorKind::EmpiricalSamples;
        prior.eta_samples = hh::io::read_eta_samples(opt.eta_samples_path);
        prior.eta_bandwidth = opt.eta_bandwidth;
    } else {
        throw std::runtime_error("unknown eta prior '" + opt.eta_prior + "'");
    }
    return prior;
}

json interval_json(const hh::IntervalSummary& s) {
    return json{{"mean", s.mean}, {"lo", s.lo}, {"hi", s.hi}};
}

json config_echo(const RunOptions& opt) {
    return json{{"dataset", opt.dataset_path},
                {"m", opt.m},
                {"model", opt.model},
                {"distribution", opt.distribution_path},
                {"alpha0", opt.alpha0},
                {"beta_prior", opt.beta_prior},
                {"beta_scale", opt.beta_scale},
                {"eta_prior", opt.eta_prior},
                {"eta_value", opt.eta_value},
                {"eta_samples", opt.eta_samples_path},
                {"eta_bandwidth", opt.eta_bandwidth},
                {"fit_eta", opt.fit_eta},
                {"s", opt.s},
                {"sigma_beta", opt.sigma_beta},
                {"sigma_eta", opt.sigma_eta},
                {"iterations", opt.iterations},
                {"burn_in", opt.burn_in},
                {"thinning", opt.thinning},
                {"seed", opt.seed},
                {"init_beta", opt.init_beta},
                {"init_eta", opt.init_eta},
                {"chains", opt.chains},
                {"output_dir", opt.output_dir}};
}

struct FitResult {
    hh::PosteriorSummary summary;
    std::vector<hh::PosteriorSample> pooled;
    json per_chain = json::array();
};

FitResult run_fit(const RunOptions& opt, const hh::Dataset& dataset,
                  const std::string& tag) {
    const int m = std::visit([](const auto& d) { return d.m; }, dataset);
    auto dist = hh::io::read_distribution(opt.distribution_path);
    if (dist.m != m)
        throw std::runtime_error("distribution covers " + std::to_string(dist.m) +
                                 " contact strata but the dataset has m=" + std::to_string(m));
    auto alpha = hh::dirichlet_from_distribution(dist, opt.alpha0);
    auto model = parse_model(opt.model);
    auto prior = build_prior(opt);

    hh::ChainConfig config;
    config.iterations = opt.iterations;
    config.burn_in = opt.burn_in;
    config.thinning = opt.thinning;
    config.init = {opt.init_beta, opt.init_eta};
    config.proposal.s = opt.s;
    config.proposal.sigma_beta = opt.sigma_beta;
    config.proposal.sigma_eta = opt.sigma_eta;
    config.proposal.fit_eta = opt.fit_eta;
    config.proposal.adapt = !opt.no_adapt;

    const fs::path out_dir(opt.output_dir);
    fs::create_directories(out_dir);

    FitResult result;
    for (int chain = 0; chain < opt.chains; ++chain) {
        config.seed = opt.seed + static_cast<std::uint64_t>(chain);
        auto chain_result = hh::run_chain(dataset, alpha, model, prior, config);
        const std::string suffix =
            opt.chains > 1 ? "_chain" + std::to_string(chain + 1) : "";
        hh::io::write_samples_csv(chain_result.samples, m,
                                  out_dir / (tag + "samples" + suffix + ".csv"));
        hh::io::write_trace_csv(chain_result.theta_trace,
                                out_dir / (tag + "trace" + suffix + ".csv"));
        auto chain_summary = hh::summarize(chain_result.samples);
        json cj{{"seed", config.seed},
                {"beta", interval_json(chain_summary.beta)},
                {"eta", interval_json(chain_summary.eta)},
                {"theta_acceptance", chain_result.diagnostics.theta_acceptance()},
                {"structure_acceptance", chain_result.diagnostics.structure_acceptance()},
                {"structure_no_move", chain_result.diagnostics.structure_no_move}};
        result.per_chain.push_back(std::move(cj));
        result.pooled.insert(result.pooled.end(), chain_result.samples.begin(),
                             chain_result.samples.end());
    }
    result.summary = hh::summarize(result.pooled);

    auto sar = hh::implied_sar(result.pooled, model, m);
    hh::io::write_sar_csv(sar, out_dir / (tag + "sar.csv"));

    json strata = json::array();
    for (const auto& s : result.summary.stratum_households)
        strata.push_back(interval_json(s));
    json summary{{"beta", interval_json(result.summary.beta)},
                 {"eta", interval_json(result.summary.eta)},
                 {"stratum_households", strata},
                 {"chains", result.per_chain},
                 {"seed", opt.seed},
                 {"config", config_echo(opt)}};
    std::ofstream out(out_dir / (tag + "summary.json"), std::ios::binary);
    out << summary.dump(2) << '\n';
    return result;
}

int cmd_fit(RunOptions& opt, const CLI::App* cmd) {
    apply_config_file(opt, cmd);
    if (!opt.batch_path.empty()) {
        // one low-information study per row, each with its own alpha source
        std::ifstream in(opt.batch_path);
        if (!in) throw std::runtime_error("cannot open batch file " + opt.batch_path);
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("empty batch file");
        if (line != "study,households,contacts,cases,m,distribution,alpha0")
            throw std::runtime_error("unexpected batch header: " + line);
        const fs::path out_dir(opt.output_dir);
        fs::create_directories(out_dir);
        std::ofstream batch_out(out_dir / "batch_summary.csv", std::ios::binary);
        batch_out << "study,beta_mean,beta_lo,beta_hi,eta_mean,eta_lo,eta_hi\n";
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::string study, field;
            RunOptions row = opt;
            hh::LowInfoDataset d;
            std::getline(ss, study, ',');
            std::getline(ss, field, ',');
            d.households = std::stoll(field);
            std::getline(ss, field, ',');
            d.contacts = std::stoll(field);
            std::getline(ss, field, ',');
            d.cases = std::stoll(field);
            std::getline(ss, field, ',');
            d.m = std::stoi(field);
            std::getline(ss, row.distribution_path, ',');
            std::getline(ss, field, ',');
            row.alpha0 = std::stod(field);
            d.validate();
            auto result = run_fit(row, hh::Dataset{d}, study + "_");
            batch_out << study << ',' << hh::io::format_double(result.summary.beta.mean)
                      << ',' << hh::io::format_double(result.summary.beta.lo) << ','
                      << hh::io::format_double(result.summary.beta.hi) << ','
                      << hh::io::format_double(result.summary.eta.mean) << ','
                      << hh::io::format_double(result.summary.eta.lo) << ','
                      << hh::io::format_double(result.summary.eta.hi) << '\n';
        }
        return 0;
    }
    auto dataset = hh::io::read_dataset(opt.dataset_path, opt.m);
    run_fit(opt, dataset, "");
    return 0;
}

int cmd_simulate(const RunOptions& opt, double beta, double eta,
                 std::int64_t households, const std::string& output) {
    auto dist = hh::io::read_distribution(opt.distribution_path);
    std::mt19937_64 rng(opt.seed);
    auto data = hh::generate_dataset(dist, {beta, eta}, parse_model(opt.model), households,
                                     rng);
    hh::io::write_dataset(hh::Dataset{data}, output);
    json meta{{"beta", beta},
              {"eta", eta},
              {"model", opt.model},
              {"households", households},
              {"seed", opt.seed},
              {"distribution", opt.distribution_path}};
    std::ofstream out(output + ".meta.json", std::ios::binary);
    out << meta.dump(2) << '\n';
    return 0;
}

int cmd_aggregate(const std::string& input, const std::string& target,
                  const std::string& output, int m) {
    auto dataset = hh::io::read_dataset(input, m);
    const auto level = hh::io::dataset_level(dataset);
    if (target == "medium") {
        if (level != hh::InfoLevel::High)
            throw std::runtime_error("aggregate to medium requires a high-information input");
        hh::io::write_dataset(
            hh::Dataset{hh::aggregate_to_medium(std::get<hh::HighInfoDataset>(dataset))},
            output);
    } else if (target == "low") {
        if (level == hh::InfoLevel::Low)
            throw std::runtime_error("input is already low information");
        auto low = level == hh::InfoLevel::High
                       ? hh::aggregate_to_low(std::get<hh::HighInfoDataset>(dataset))
                       : hh::aggregate_to_low(std::get<hh::MediumInfoDataset>(dataset));
        hh::io::write_dataset(hh::Dataset{low}, output);
    } else {
        throw std::runtime_error("aggregation target must be medium or low");
    }
    return 0;
}

int cmd_validate_coverage(const RunOptions& opt, const std::vector<double>& betas,
                          const std::vector<double>& etas,
                          const std::vector<double>& alpha0s, std::int64_t replicates,
                          std::int64_t households, const std::string& output) {
    hh::CoverageSpec spec;
    for (double b : betas)
        for (double e : etas) spec.theta_grid.push_back({b, e});
    spec.dist = hh::io::read_distribution(opt.distribution_path);
    spec.distribution_name = fs::path(opt.distribution_path).stem().string();
    spec.generator_model = parse_model(opt.model);
    spec.fit_model = parse_model(opt.model);
    spec.alpha0_list = alpha0s;
    spec.replicates = replicates;
    spec.households_per_dataset = households;
    spec.chain.iterations = opt.iterations;
    spec.chain.burn_in = opt.burn_in;
    spec.chain.thinning = opt.thinning;
    spec.chain.init.beta = opt.init_beta;
    spec.chain.proposal.s = opt.s;
    spec.chain.proposal.sigma_beta = opt.sigma_beta;
    spec.master_seed = opt.seed;
    auto table = hh::coverage_experiment(spec);
    hh::io::write_coverage_csv(table, output);
    return 0;
}

int cmd_summarize(const std::string& samples_path, const std::string& output) {
    auto samples = hh::io::read_samples_csv(samples_path);
    auto summary = hh::summarize(samples);
    json strata = json::array();
    for (const auto& s : summary.stratum_households) strata.push_back(interval_json(s));
    json j{{"beta", interval_json(summary.beta)},
           {"eta", interval_json(summary.eta)},
           {"stratum_households", strata},
           {"samples", samples.size()}};
    if (output.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::ofstream out(output, std::ios::binary);
        out << j.dump(2) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Household transmission parameter inference from final-size data"};
    app.require_subcommand(1);

    RunOptions opt;
    opt.seed = default_seed();

    auto add_chain_flags = [&](CLI::App* cmd) {
        cmd->add_option("--model", opt.model, "infectious period: gamma shape or 'fixed'");
        cmd->add_option("--s", opt.s, "probability of a theta move per iteration");
        cmd->add_option("--sigma-beta", opt.sigma_beta);
        cmd->add_option("--sigma-eta", opt.sigma_eta);
        cmd->add_flag("--no-adapt", opt.no_adapt, "disable burn-in proposal adaptation");
        cmd->add_option("--iterations", opt.iterations);
        cmd->add_option("--burn-in", opt.burn_in);
        cmd->add_option("--thinning", opt.thinning);
        cmd->add_option("--seed", opt.seed, "RNG seed (falls back to HHINFER_SEED)");
        cmd->add_option("--init-beta", opt.init_beta);
        cmd->add_option("--init-eta", opt.init_eta);
        cmd->add_option("--output-dir", opt.output_dir);
    };

    auto* fit = app.add_subcommand("fit", "fit transmission parameters to a dataset");
    fit->add_option("--dataset", opt.dataset_path, "dataset CSV (level from header)");
    fit->add_option("--batch", opt.batch_path, "per-study low-information batch CSV");
    fit->add_option("--m", opt.m, "max contacts (needed for low-information files)");
    fit->add_option("--distribution", opt.distribution_path,
                    "household distribution CSV for the Dirichlet mean");
    fit->add_option("--alpha0", opt.alpha0, "Dirichlet concentration");
    fit->add_option("--beta-prior", opt.beta_prior, "improper|halfnormal");
    fit->add_option("--beta-scale", opt.beta_scale);
    fit->add_option("--eta-prior", opt.eta_prior, "uniform|fixed|empirical");
    fit->add_option("--eta", opt.eta_value, "eta value for the fixed prior");
    fit->add_option("--eta-samples", opt.eta_samples_path);
    fit->add_option("--eta-bandwidth", opt.eta_bandwidth);
    fit->add_flag("!--no-fit-eta", opt.fit_eta, "hold eta fixed at init-eta");
    fit->add_option("--chains", opt.chains);
    fit->add_option("--config", opt.config_path, "JSON config, overrides flags");
    add_chain_flags(fit);

    double sim_beta = 0.5, sim_eta = 0.5;
    std::int64_t sim_households = 1000;
    std::string sim_output = "dataset.csv";
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
    simulate->add_option("--distribution", opt.distribution_path)->required();
    simulate->add_option("--beta", sim_beta);
    simulate->add_option("--eta", sim_eta);
    simulate->add_option("--model", opt.model);
    simulate->add_option("--households", sim_households);
    simulate->add_option("--seed", opt.seed);
    simulate->add_option("--output", sim_output);

    std::string agg_input, agg_target, agg_output = "aggregated.csv";
    auto* aggregate = app.add_subcommand("aggregate", "reduce a dataset to a coarser level");
    aggregate->add_option("--input", agg_input)->required();
    aggregate->add_option("--to", agg_target, "medium|low")->required();
    aggregate->add_option("--output", agg_output);
    aggregate->add_option("--m", opt.m);

    std::vector<double> cov_betas{0.5}, cov_etas{0.0}, cov_alpha0s{100.0};
    std::int64_t cov_replicates = 20, cov_households = 1000;
    std::string cov_output = "coverage.csv";
    auto* coverage = app.add_subcommand("validate-coverage",
                                        "synthetic coverage experiment");
    coverage->add_option("--distribution", opt.distribution_path)->required();
    coverage->add_option("--beta", cov_betas, "true beta grid");
    coverage->add_option("--eta", cov_etas, "true eta grid");
    coverage->add_option("--alpha0", cov_alpha0s);
    coverage->add_option("--replicates", cov_replicates);
    coverage->add_option("--households", cov_households);
    coverage->add_option("--output", cov_output);
    add_chain_flags(coverage);

    std::string sum_samples, sum_output;
    auto* summarize = app.add_subcommand("summarize", "summarise a samples file");
    summarize->add_option("--samples", sum_samples)->required();
    summarize->add_option("--output", sum_output, "write JSON here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) return cmd_fit(opt, fit);
        if (simulate->parsed())
            return cmd_simulate(opt, sim_beta, sim_eta, sim_households, sim_output);
        if (aggregate->parsed()) return cmd_aggregate(agg_input, agg_target, agg_output, opt.m);
        if (coverage->parsed())
            return cmd_validate_coverage(opt, cov_betas, cov_etas, cov_alpha0s,
                                         cov_replicates, cov_households, cov_output);
        if (summarize->parsed()) return cmd_summarize(sum_samples, sum_output);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
