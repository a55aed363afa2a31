#pragma once

// Experiment runner: builds targets and initial states from a validated
// config, executes pt_run per repeat with derived seeds, and writes the
// CSV outputs plus a resolved-config snapshot.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aemcmc/config.hpp"
#include "aemcmc/data.hpp"
#include "aemcmc/diagnostics.hpp"
#include "aemcmc/ensemble.hpp"
#include "aemcmc/runner_csv.hpp"

namespace aemcmc {

struct RunSummary {
    std::vector<std::string> run_dirs;
    std::string snapshot_path;
};

namespace detail {

inline SamplerConfig sampler_config_from(const ExperimentConfig& c) {
    SamplerConfig sc;
    if (c.sampler.sampler == "gibbs")
        sc.kind = SamplerKind::SingleSiteGibbs;
    else if (c.sampler.sampler == "ffbs-row")
        sc.kind = SamplerKind::RowGibbsFFBS;
    else
        sc.kind = SamplerKind::HammingBall;
    sc.hb_radius = c.sampler.hb_radius;
    return sc;
}

// Drop records at or before the burn-in iteration; diagnostics only.
inline TraceStore trace_after_burn_in(const TraceStore& trace, std::size_t burn_in) {
    if (burn_in == 0) return trace;
    TraceStore out = trace;
    out.states.clear();
    for (const StoredState& s : trace.states)
        if (s.iteration > burn_in) out.states.push_back(s);
    out.exchanges.clear();
    for (const ExchangeRecord& e : trace.exchanges)
        if (e.iteration > burn_in) out.exchanges.push_back(e);
    return out;
}

inline void write_diagnostics_csv(const std::string& path, const TraceStore& trace,
                                  const ExperimentConfig& cfg, const ToyBlockTarget* toy) {
    CsvWriter csv(path);
    csv.row("statistic", "lag_or_block", "iteration", "value");
    const TraceStore diag_trace = trace_after_burn_in(trace, cfg.ensemble.burn_in);

    const LogPosteriorSummary lp = log_posterior_summary(trace);
    for (std::size_t c = 0; c < lp.running_max.size(); ++c) {
        const std::vector<double>& rm = lp.running_max[c];
        for (std::size_t i = 0; i < rm.size(); ++i)
            csv.row("running_max_log_posterior", c, i, rm[i]);
    }

    for (const LagStat& stat : hamming_lag_stats(diag_trace, {1, 10, 50})) {
        std::size_t i = 0;
        for (double v : stat.values) csv.row("hamming_lag", stat.lag, i++, v);
    }

    if (toy != nullptr) {
        const ModeJumpStats jumps = count_mode_jumps(diag_trace, *toy);
        for (std::size_t i = 0; i < jumps.iterations.size(); ++i)
            csv.row("cum_mode_jumps", 0, jumps.iterations[i], jumps.cumulative[i]);
        csv.row("distinct_mode_labels", 0, trace.n_iterations, jumps.distinct_labels);
        csv.row("distinct_exact_modes", 0, trace.n_iterations, jumps.distinct_exact_modes);
        if (cfg.ensemble.thin == 1 && cfg.ensemble.exchange != "none") {
            const ExchangeModeVisits visits = count_exchange_mode_visits(diag_trace, *toy);
            csv.row("accepted_exchanges", 0, trace.n_iterations, visits.accepted_exchanges);
            csv.row("distinct_modes_via_exchange", 0, trace.n_iterations,
                    visits.distinct_labels);
        }
    }
}

inline void write_run_outputs(const std::string& dir, const TraceStore& trace,
                              const ExperimentConfig& cfg, const ToyBlockTarget* toy) {
    std::filesystem::create_directories(dir);
    {
        CsvWriter csv(dir + "/trace.csv");
        csv.row("iteration", "chain", "beta", "log_posterior");
        for (std::size_t c = 0; c < trace.n_chains; ++c)
            for (std::size_t i = 0; i < trace.log_posterior[c].size(); ++i)
                csv.row(i, c, trace.betas[c], trace.log_posterior[c][i]);
    }
    {
        CsvWriter csv(dir + "/states.csv");
        csv.row("iteration", "row", "bitstring");
        for (const StoredState& s : trace.states)
            for (std::size_t k = 0; k < s.state.rows(); ++k)
                csv.row(s.iteration, k, s.state.row(k).to_string());
    }
    {
        CsvWriter csv(dir + "/exchanges.csv");
        csv.row("iteration", "pair_i", "pair_j", "kind", "accepted", "t0");
        for (const ExchangeRecord& e : trace.exchanges)
            csv.row(e.iteration, e.chain_i, e.chain_j, exchange_kind_name(e.kind),
                    e.accepted ? 1 : 0,
                    e.kind == ExchangeKind::AugmentedCrossover ? std::to_string(e.t0)
                                                               : std::string());
    }
    write_diagnostics_csv(dir + "/diagnostics.csv", trace, cfg, toy);
}

inline std::string run_dir_name(const std::string& base, std::size_t repeat) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "run_%03zu", repeat);
    return base + "/" + buf;
}

}  // namespace detail

// FHMM model assembly shared by the runner and the acceptance suite.
inline FhmmModel build_fhmm_model(const ExperimentConfig& cfg, std::vector<double> y) {
    const ModelSection& m = cfg.model;
    MarkovChainPrior prior = MarkovChainPrior::homogeneous(m.K, m.self_transition, m.init_p1);
    if (m.weights.size() != m.K)
        throw std::invalid_argument("config: weights must have K entries");
    if (m.emission == "additive")
        return FhmmModel(std::move(prior), AdditiveGaussianEmission(m.weights, m.h, m.sigma2),
                         std::move(y), m.fixed_rows);
    return FhmmModel(std::move(prior),
                     MarginalizedDepthEmission(m.weights, m.mu_h, m.sigma_h * m.sigma_h,
                                               m.sigma2),
                     std::move(y), m.fixed_rows);
}

inline std::uint64_t config_hash(const ExperimentConfig& cfg) {
    const std::string s = json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Execute all repeats of an experiment. Repeat r uses the derived seed
// derive_seed(seed, kRepeat, r) for everything random in that run, so a
// rerun with the same config is byte-identical, and runs with the same
// seed see the same data and initial states regardless of the exchange
// kind under comparison.
inline RunSummary run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.experiment == ExperimentKind::FhmmData && !cfg.model.counts_path.empty() &&
        !std::filesystem::exists(cfg.model.counts_path))
        throw std::runtime_error("counts file does not exist: " + cfg.model.counts_path);

    std::filesystem::create_directories(cfg.output_dir);
    RunSummary summary;
    summary.snapshot_path = cfg.output_dir + "/config.json";
    {
        std::ofstream snap(summary.snapshot_path, std::ios::binary);
        snap << json(cfg).dump(2) << "\n";
    }
    const std::uint64_t hash = config_hash(cfg);

    for (std::size_t r = 0; r < cfg.repeats; ++r) {
        const std::uint64_t run_seed = derive_seed(cfg.seed, stream::kRepeat, r);
        const std::string dir = detail::run_dir_name(cfg.output_dir, r);

        if (cfg.experiment == ExperimentKind::Toy) {
            std::vector<double> alphas = cfg.model.alphas;
            if (alphas.empty()) {
                RngStream arng(derive_seed(run_seed, stream::kAlphas));
                alphas = draw_alphas(cfg.model.n_blocks, arng);
            }
            const ToyBlockTarget target =
                ToyBlockTarget::equal_blocks(cfg.model.T, cfg.model.n_blocks, alphas);
            PtOptions<BinarySequence> opt;
            opt.betas = cfg.ensemble.betas;
            opt.sampler = detail::sampler_config_from(cfg);
            opt.exchange = exchange_kind_from_name(cfg.ensemble.exchange);
            opt.exchange_period = cfg.ensemble.exchange_period;
            opt.n_iterations = cfg.ensemble.n_iterations + cfg.ensemble.burn_in;
            opt.thin = cfg.ensemble.thin;
            opt.run_seed = run_seed;
            opt.init.assign(cfg.ensemble.n_chains, BinarySequence(cfg.model.T, 1));
            TraceStore trace = pt_run(target, opt);
            trace.config_hash = hash;
            detail::write_run_outputs(dir, trace, cfg, &target);
        } else {
            std::vector<double> y;
            BinaryMatrix init(1, 1);
            if (cfg.experiment == ExperimentKind::FhmmSim) {
                SimData data = generate_sim_data(run_seed, cfg.model.sim_blocks,
                                                 cfg.model.sim_block_len, cfg.model.weights,
                                                 cfg.model.h, cfg.model.sigma2);
                y = data.obs.y;
                init = data.truth;  // the generating, lower-posterior mode
            } else {
                Observations obs = cfg.model.counts_path.empty()
                                       ? generate_synthetic_counts(cfg.seed, cfg.model)
                                       : load_counts(cfg.model.counts_path);
                y = obs.y;
                // initial state drawn from the Markov prior
                RngStream irng(derive_seed(run_seed, stream::kInit));
                MarkovChainPrior prior = MarkovChainPrior::homogeneous(
                    cfg.model.K, cfg.model.self_transition, cfg.model.init_p1);
                init = BinaryMatrix(cfg.model.K, obs.size(), 0);
                for (std::size_t k = 0; k < cfg.model.K; ++k) {
                    bool fixed = false;
                    for (std::size_t f : cfg.model.fixed_rows) fixed = fixed || (f == k);
                    if (fixed) {
                        for (std::size_t t = 0; t < obs.size(); ++t) init.set_unchecked(k, t, 1);
                        continue;
                    }
                    Bit b = irng.bernoulli(prior.init_prob(k, 1)) ? Bit{1} : Bit{0};
                    init.set_unchecked(k, 0, b);
                    for (std::size_t t = 1; t < obs.size(); ++t) {
                        b = irng.bernoulli(prior.trans_prob(k, b, 1)) ? Bit{1} : Bit{0};
                        init.set_unchecked(k, t, b);
                    }
                }
            }
            const FhmmTarget target(build_fhmm_model(cfg, std::move(y)));
            // fixed rows pinned to 1 in every chain's initial state
            for (std::size_t f : cfg.model.fixed_rows)
                for (std::size_t t = 0; t < init.cols(); ++t) init.set(f, t, 1);
            PtOptions<BinaryMatrix> opt;
            opt.betas = cfg.ensemble.betas;
            opt.sampler = detail::sampler_config_from(cfg);
            opt.exchange = exchange_kind_from_name(cfg.ensemble.exchange);
            opt.exchange_period = cfg.ensemble.exchange_period;
            opt.n_iterations = cfg.ensemble.n_iterations + cfg.ensemble.burn_in;
            opt.thin = cfg.ensemble.thin;
            opt.run_seed = run_seed;
            opt.init.assign(cfg.ensemble.n_chains, init);
            TraceStore trace = pt_run(target, opt);
            trace.config_hash = hash;
            detail::write_run_outputs(dir, trace, cfg, nullptr);
        }
        summary.run_dirs.push_back(dir);
    }
    return summary;
}

}  // namespace aemcmc
