#pragma once

// Observation ingestion and synthetic data generation for the two FHMM
// experiments, plus the canned toy experiment configuration.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aemcmc/binary.hpp"
#include "aemcmc/config.hpp"
#include "aemcmc/fhmm.hpp"
#include "aemcmc/rng.hpp"

namespace aemcmc {

struct Observations {
    std::vector<double> y;
    std::vector<std::string> chrom;  // optional locus coordinates
    std::vector<long long> pos;

    bool has_coords() const { return !chrom.empty(); }
    std::size_t size() const { return y.size(); }
};

// Tab-separated counts file with header columns chromosome, position,
// count. Row order is preserved; parse failures cite the line number.
inline Observations load_counts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open counts file: " + path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    ++lineno;

    const auto split_tabs = [](const std::string& s) {
        std::vector<std::string> out;
        std::string field;
        std::istringstream ss(s);
        while (std::getline(ss, field, '\t')) out.push_back(field);
        return out;
    };

    const std::vector<std::string> header = split_tabs(line);
    if (header.size() < 3 || header[0] != "chromosome" || header[1] != "position" ||
        header[2] != "count")
        throw std::runtime_error(path + ": expected header 'chromosome\tposition\tcount'");

    Observations obs;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_tabs(line);
        if (fields.size() < 3)
            throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                     ": expected 3 tab-separated fields");
        const auto parse_num = [&](const std::string& text, const char* what) {
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(text, &used);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                         ": malformed " + what + " '" + text + "'");
            }
            while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used])))
                ++used;
            if (used != text.size())
                throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                         ": malformed " + what + " '" + text + "'");
            return v;
        };
        const double position = parse_num(fields[1], "position");
        const double count = parse_num(fields[2], "count");
        if (!std::isfinite(count))
            throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                     ": non-finite count");
        obs.chrom.push_back(fields[0]);
        obs.pos.push_back(static_cast<long long>(position));
        obs.y.push_back(count);
    }
    if (obs.y.empty()) throw std::runtime_error(path + ": no observations");
    return obs;
}

// Per-run alpha draw: uniform over {0.01, 0.02, 0.03, 0.04, 0.05}.
inline std::vector<double> draw_alphas(std::size_t n_blocks, RngStream& rng) {
    static constexpr double kGrid[5] = {0.01, 0.02, 0.03, 0.04, 0.05};
    std::vector<double> alphas(n_blocks);
    for (double& a : alphas) a = kGrid[rng.uniform_index(5)];
    return alphas;
}

// Canned toy study configuration: T=50 in B equal blocks, alphas drawn
// deterministically from the seed, 10,000 iterations, betas (1.0, 0.2),
// exchange every 10th iteration, chains initialised at the all-ones mode.
inline ExperimentConfig generate_toy_config(std::size_t n_blocks, std::uint64_t seed) {
    ExperimentConfig c = default_toy_config();
    c.seed = seed;
    c.model.n_blocks = n_blocks;
    if (c.model.T % n_blocks != 0)
        throw std::invalid_argument("generate_toy_config: T=50 must split into equal blocks");
    RngStream rng(derive_seed(seed, stream::kAlphas));
    c.model.alphas = draw_alphas(n_blocks, rng);
    return c;
}

struct SimData {
    Observations obs;
    BinaryMatrix truth;
};

// Simulation-study generator: K=3 ground truth made of alternating column
// blocks (1,1,0) then (0,0,0), y_t ~ N(h * sum_k w_k x_{k,t}, sigma2).
// The weights w1 + w2 = 0.52 vs w3 = 0.48 make (1,1,0) and (0,0,1)
// near-indistinguishable explanations of the elevated columns.
inline SimData generate_sim_data(std::uint64_t seed, std::size_t n_blocks = 20,
                                 std::size_t block_len = 5,
                                 const std::vector<double>& w = {0.21, 0.31, 0.48},
                                 double h = 15.0, double sigma2 = 1.0) {
    if (n_blocks == 0 || block_len == 0)
        throw std::invalid_argument("generate_sim_data: empty block layout");
    if (w.size() != 3) throw std::invalid_argument("generate_sim_data: K=3 weights expected");
    const std::size_t t_len = n_blocks * block_len;
    BinaryMatrix truth(3, t_len, 0);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        if (b % 2 != 0) continue;  // odd blocks stay (0,0,0)
        for (std::size_t t = b * block_len; t < (b + 1) * block_len; ++t) {
            truth.set_unchecked(0, t, 1);
            truth.set_unchecked(1, t, 1);
        }
    }
    RngStream rng(derive_seed(seed, stream::kData));
    Observations obs;
    obs.y.resize(t_len);
    const double sd = std::sqrt(sigma2);
    for (std::size_t t = 0; t < t_len; ++t) {
        double s = 0.0;
        for (std::size_t k = 0; k < 3; ++k)
            if (truth(k, t)) s += w[k];
        obs.y[t] = rng.normal(h * s, sd);
    }
    return {std::move(obs), std::move(truth)};
}

// Synthetic stand-in for real sequencing counts: X drawn from the Markov
// prior (fixed rows pinned to 1), y_t from the marginalized-depth
// emission, chromosome labels assigned in contiguous segments.
inline Observations generate_synthetic_counts(std::uint64_t seed, const ModelSection& m) {
    const std::size_t t_len = m.synthetic_T;
    if (t_len == 0) throw std::invalid_argument("generate_synthetic_counts: T >= 1");
    MarkovChainPrior prior = MarkovChainPrior::homogeneous(m.K, m.self_transition, m.init_p1);
    RngStream rng(derive_seed(seed, stream::kData));

    BinaryMatrix x(m.K, t_len, 0);
    for (std::size_t k = 0; k < m.K; ++k) {
        bool fixed = false;
        for (std::size_t f : m.fixed_rows) fixed = fixed || (f == k);
        if (fixed) {
            for (std::size_t t = 0; t < t_len; ++t) x.set_unchecked(k, t, 1);
            continue;
        }
        Bit b = rng.bernoulli(prior.init_prob(k, 1)) ? Bit{1} : Bit{0};
        x.set_unchecked(k, 0, b);
        for (std::size_t t = 1; t < t_len; ++t) {
            b = rng.bernoulli(prior.trans_prob(k, b, 1)) ? Bit{1} : Bit{0};
            x.set_unchecked(k, t, b);
        }
    }

    const std::vector<double>& w = m.weights;
    if (w.size() != m.K)
        throw std::invalid_argument("generate_synthetic_counts: weights must have K entries");
    Observations obs;
    obs.y.resize(t_len);
    obs.chrom.resize(t_len);
    obs.pos.resize(t_len);
    const std::size_t n_segments = std::min<std::size_t>(22, t_len);
    const double sigma2_h = m.sigma_h * m.sigma_h;
    for (std::size_t t = 0; t < t_len; ++t) {
        double s = 0.0;
        for (std::size_t k = 0; k < m.K; ++k)
            if (x(k, t)) s += w[k];
        obs.y[t] = rng.normal(m.mu_h * s, std::sqrt(m.sigma2 + sigma2_h * s * s));
        const std::size_t seg = t * n_segments / t_len;
        obs.chrom[t] = "chr" + std::to_string(seg + 1);
        obs.pos[t] = static_cast<long long>(t + 1);
    }
    return obs;
}

}  // namespace aemcmc
