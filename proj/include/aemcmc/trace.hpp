#pragma once

// Per-run trace records backing diagnostics and file output.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "aemcmc/binary.hpp"

namespace aemcmc {

enum class ExchangeKind { None, Swap, RandomCrossover, AugmentedCrossover };

inline std::string exchange_kind_name(ExchangeKind k) {
    switch (k) {
        case ExchangeKind::None: return "none";
        case ExchangeKind::Swap: return "swap";
        case ExchangeKind::RandomCrossover: return "random-cr";
        case ExchangeKind::AugmentedCrossover: return "augmented-cr";
    }
    return "?";
}

struct ExchangeRecord {
    std::size_t iteration = 0;
    std::size_t chain_i = 0;
    std::size_t chain_j = 0;
    ExchangeKind kind = ExchangeKind::None;
    bool accepted = false;
    std::size_t t0 = 0;  // chosen candidate index, 1..2T; augmented moves only
};

struct StoredState {
    std::size_t iteration;
    BinaryMatrix state;  // sequences stored as 1 x T
};

struct TraceStore {
    std::size_t n_chains = 0;
    std::size_t n_iterations = 0;
    std::size_t thin = 1;
    std::vector<double> betas;
    // log_posterior[chain][i]: tempered log-density at the chain's own
    // beta; index 0 is the initial state, then one entry per iteration.
    std::vector<std::vector<double>> log_posterior;
    std::vector<StoredState> states;  // chain 0, iteration 0 and every thin-th
    std::vector<ExchangeRecord> exchanges;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
};

}  // namespace aemcmc
