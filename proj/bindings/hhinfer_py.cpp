#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "hhinfer/io.hpp"
#include "hhinfer/mcmc.hpp"
#include "hhinfer/synth.hpp"

namespace py = pybind11;
using namespace hh;

PYBIND11_MODULE(_hhinfer, mod) {
    mod.doc() = "Household transmission parameter inference";

    py::class_<Theta>(mod, "Theta")
        .def(py::init<>())
        .def(py::init([](double beta, double eta) { return Theta{beta, eta}; }),
             py::arg("beta"), py::arg("eta"))
        .def_readwrite("beta", &Theta::beta)
        .def_readwrite("eta", &Theta::eta)
        .def("__repr__", [](const Theta& t) {
            return "Theta(beta=" + std::to_string(t.beta) +
                   ", eta=" + std::to_string(t.eta) + ")";
        });

    py::class_<InfectiousPeriodModel>(mod, "InfectiousPeriodModel")
        .def_static("gamma", &InfectiousPeriodModel::gamma, py::arg("shape"))
        .def_static("fixed", &InfectiousPeriodModel::fixed)
        .def_property_readonly("is_fixed", &InfectiousPeriodModel::is_fixed)
        .def("mgf", &InfectiousPeriodModel::mgf, py::arg("t"));

    mod.def("encode", &encode, py::arg("n"), py::arg("z"), py::arg("m"));
    mod.def("decode", &decode, py::arg("k"), py::arg("m"));
    mod.def("outcome_space_size", &outcome_space_size, py::arg("m"));

    mod.def("household_rate", &household_rate, py::arg("theta"), py::arg("n"));
    mod.def("final_size_distribution", &final_size_distribution, py::arg("theta"),
            py::arg("model"), py::arg("n"));
    mod.def("expected_sar", &expected_sar, py::arg("theta"), py::arg("model"),
            py::arg("n"));
    mod.def(
        "simulate_household_outbreak",
        [](const Theta& theta, const InfectiousPeriodModel& model, int n,
           std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            return simulate_household_outbreak(theta, model, n, rng);
        },
        py::arg("theta"), py::arg("model"), py::arg("n"), py::arg("seed"));

    py::class_<HighInfoDataset>(mod, "HighInfoDataset")
        .def(py::init([](int m, OutcomeVector counts) {
                 HighInfoDataset d{m, std::move(counts)};
                 d.validate();
                 return d;
             }),
             py::arg("m"), py::arg("counts"))
        .def_readonly("m", &HighInfoDataset::m)
        .def_readonly("counts", &HighInfoDataset::counts)
        .def("households", &HighInfoDataset::households);

    py::class_<MediumInfoDataset>(mod, "MediumInfoDataset")
        .def(py::init([](int m, std::vector<std::int64_t> contacts,
                         std::vector<std::int64_t> cases) {
                 MediumInfoDataset d{m, std::move(contacts), std::move(cases)};
                 d.validate();
                 return d;
             }),
             py::arg("m"), py::arg("contacts_by_size"), py::arg("cases_by_size"))
        .def_readonly("m", &MediumInfoDataset::m)
        .def_readonly("contacts_by_size", &MediumInfoDataset::contacts_by_size)
        .def_readonly("cases_by_size", &MediumInfoDataset::cases_by_size)
        .def("households", &MediumInfoDataset::households);

    py::class_<LowInfoDataset>(mod, "LowInfoDataset")
        .def(py::init([](int m, std::int64_t households, std::int64_t contacts,
                         std::int64_t cases) {
                 LowInfoDataset d{m, households, contacts, cases};
                 d.validate();
                 return d;
             }),
             py::arg("m"), py::arg("households"), py::arg("contacts"), py::arg("cases"))
        .def_readonly("m", &LowInfoDataset::m)
        .def_readonly("households", &LowInfoDataset::households)
        .def_readonly("contacts", &LowInfoDataset::contacts)
        .def_readonly("cases", &LowInfoDataset::cases);

    mod.def("aggregate_to_medium", &aggregate_to_medium, py::arg("dataset"));
    mod.def("aggregate_to_low",
            py::overload_cast<const HighInfoDataset&>(&aggregate_to_low),
            py::arg("dataset"));
    mod.def("aggregate_to_low",
            py::overload_cast<const MediumInfoDataset&>(&aggregate_to_low),
            py::arg("dataset"));
    mod.def("stratum_households", &stratum_households, py::arg("counts"), py::arg("m"));

    py::class_<ContactDistribution>(mod, "ContactDistribution")
        .def(py::init([](int m, std::vector<double> probs) {
                 ContactDistribution d{m, std::move(probs)};
                 d.validate();
                 return d;
             }),
             py::arg("m"), py::arg("probs"))
        .def_readonly("m", &ContactDistribution::m)
        .def_readonly("probs", &ContactDistribution::probs);

    mod.def("size_weight", &size_weight, py::arg("population"));
    mod.def(
        "generate_dataset",
        [](const ContactDistribution& dist, const Theta& theta,
           const InfectiousPeriodModel& model, std::int64_t households,
           std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            return generate_dataset(dist, theta, model, households, rng);
        },
        py::arg("distribution"), py::arg("theta"), py::arg("model"),
        py::arg("households"), py::arg("seed"));

    py::class_<DirichletSpec>(mod, "DirichletSpec")
        .def(py::init([](std::vector<double> alpha) {
                 return DirichletSpec{std::move(alpha)};
             }),
             py::arg("alpha"))
        .def_readonly("alpha", &DirichletSpec::alpha);
    mod.def("dirichlet_from_distribution", &dirichlet_from_distribution,
            py::arg("distribution"), py::arg("alpha0"));

    py::enum_<BetaPriorKind>(mod, "BetaPriorKind")
        .value("ImproperPositive", BetaPriorKind::ImproperPositive)
        .value("HalfNormal", BetaPriorKind::HalfNormal);
    py::enum_<EtaPriorKind>(mod, "EtaPriorKind")
        .value("Uniform", EtaPriorKind::Uniform)
        .value("PointMass", EtaPriorKind::PointMass)
        .value("EmpiricalSamples", EtaPriorKind::EmpiricalSamples);

    py::class_<PriorSpec>(mod, "PriorSpec")
        .def(py::init<>())
        .def_readwrite("beta_kind", &PriorSpec::beta_kind)
        .def_readwrite("beta_scale", &PriorSpec::beta_scale)
        .def_readwrite("eta_kind", &PriorSpec::eta_kind)
        .def_readwrite("eta_value", &PriorSpec::eta_value)
        .def_readwrite("eta_samples", &PriorSpec::eta_samples)
        .def_readwrite("eta_bandwidth", &PriorSpec::eta_bandwidth);

    mod.def("log_likelihood",
            py::overload_cast<const OutcomeVector&, const Theta&, const DirichletSpec&,
                              const InfectiousPeriodModel&, int>(&log_likelihood),
            py::arg("counts"), py::arg("theta"), py::arg("alpha"), py::arg("model"),
            py::arg("m"));

    py::class_<ProposalConfig>(mod, "ProposalConfig")
        .def(py::init<>())
        .def_readwrite("s", &ProposalConfig::s)
        .def_readwrite("sigma_beta", &ProposalConfig::sigma_beta)
        .def_readwrite("sigma_eta", &ProposalConfig::sigma_eta)
        .def_readwrite("fit_eta", &ProposalConfig::fit_eta)
        .def_readwrite("adapt", &ProposalConfig::adapt);

    py::class_<ChainConfig>(mod, "ChainConfig")
        .def(py::init<>())
        .def_readwrite("iterations", &ChainConfig::iterations)
        .def_readwrite("burn_in", &ChainConfig::burn_in)
        .def_readwrite("thinning", &ChainConfig::thinning)
        .def_readwrite("seed", &ChainConfig::seed)
        .def_readwrite("init", &ChainConfig::init)
        .def_readwrite("proposal", &ChainConfig::proposal);

    py::class_<PosteriorSample>(mod, "PosteriorSample")
        .def_readonly("iteration", &PosteriorSample::iteration)
        .def_readonly("theta", &PosteriorSample::theta)
        .def_readonly("stratum_households", &PosteriorSample::stratum_households)
        .def_readonly("log_target", &PosteriorSample::log_target);

    py::class_<ChainDiagnostics>(mod, "ChainDiagnostics")
        .def_readonly("theta_proposed", &ChainDiagnostics::theta_proposed)
        .def_readonly("theta_accepted", &ChainDiagnostics::theta_accepted)
        .def_readonly("structure_proposed", &ChainDiagnostics::structure_proposed)
        .def_readonly("structure_accepted", &ChainDiagnostics::structure_accepted)
        .def("theta_acceptance", &ChainDiagnostics::theta_acceptance)
        .def("structure_acceptance", &ChainDiagnostics::structure_acceptance);

    py::class_<ChainResult>(mod, "ChainResult")
        .def_readonly("samples", &ChainResult::samples)
        .def_readonly("diagnostics", &ChainResult::diagnostics)
        .def_readonly("m", &ChainResult::m);

    mod.def("run_chain", &run_chain, py::arg("dataset"), py::arg("alpha"),
            py::arg("model"), py::arg("prior"), py::arg("config"),
            py::call_guard<py::gil_scoped_release>());

    py::class_<IntervalSummary>(mod, "IntervalSummary")
        .def_readonly("mean", &IntervalSummary::mean)
        .def_readonly("lo", &IntervalSummary::lo)
        .def_readonly("hi", &IntervalSummary::hi);
    py::class_<PosteriorSummary>(mod, "PosteriorSummary")
        .def_readonly("beta", &PosteriorSummary::beta)
        .def_readonly("eta", &PosteriorSummary::eta)
        .def_readonly("stratum_households", &PosteriorSummary::stratum_households);
    mod.def("summarize", &summarize, py::arg("samples"));
}
