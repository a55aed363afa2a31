#pragma once

// Multimodal block toy target: the sequence is partitioned into B
// contiguous blocks, each bimodal with peaks at all-ones and all-zeros.
// log p(x) = sum_j min(d(x^(j), 1s), d(x^(j), 0s)) * log(alpha_j),
// unnormalized, so every one of the 2^B per-block mode combinations is a
// global mode with value 0.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "aemcmc/binary.hpp"
#include "aemcmc/target.hpp"

namespace aemcmc {

struct Block {
    std::size_t begin;  // inclusive, 0-based
    std::size_t end;    // exclusive

    std::size_t length() const { return end - begin; }
    friend bool operator==(const Block&, const Block&) = default;
};

class ToyBlockTarget : public TargetDensity<BinarySequence> {
  public:
    ToyBlockTarget(std::size_t length, std::vector<Block> blocks, std::vector<double> alphas)
        : length_(length), blocks_(std::move(blocks)), alphas_(std::move(alphas)) {
        if (blocks_.empty() || blocks_.size() != alphas_.size())
            throw std::invalid_argument("ToyBlockTarget: need one alpha per block");
        std::size_t cursor = 0;
        for (const Block& b : blocks_) {
            if (b.begin != cursor || b.end <= b.begin)
                throw std::invalid_argument(
                    "ToyBlockTarget: blocks must be contiguous, non-empty, in order");
            cursor = b.end;
        }
        if (cursor != length_)
            throw std::invalid_argument("ToyBlockTarget: blocks must cover 1..T");
        log_alphas_.reserve(alphas_.size());
        for (double a : alphas_) {
            if (!(a > 0.0) || !(a < 1.0))
                throw std::invalid_argument("ToyBlockTarget: alphas must lie in (0, 1)");
            log_alphas_.push_back(std::log(a));
        }
        block_of_.resize(length_);
        for (std::size_t j = 0; j < blocks_.size(); ++j)
            for (std::size_t i = blocks_[j].begin; i < blocks_[j].end; ++i) block_of_[i] = j;
    }

    static ToyBlockTarget equal_blocks(std::size_t length, std::size_t n_blocks,
                                       std::vector<double> alphas) {
        if (n_blocks == 0 || length % n_blocks != 0)
            throw std::invalid_argument("ToyBlockTarget: length must split into equal blocks");
        const std::size_t w = length / n_blocks;
        std::vector<Block> blocks;
        blocks.reserve(n_blocks);
        for (std::size_t j = 0; j < n_blocks; ++j) blocks.push_back({j * w, (j + 1) * w});
        return ToyBlockTarget(length, std::move(blocks), std::move(alphas));
    }

    std::size_t length() const { return length_; }
    std::size_t num_blocks() const { return blocks_.size(); }
    const std::vector<Block>& blocks() const { return blocks_; }
    const std::vector<double>& alphas() const { return alphas_; }

    double log_density(const BinarySequence& x) const override {
        if (x.size() != length_)
            throw std::invalid_argument("ToyBlockTarget: state length mismatch");
        double lp = 0.0;
        for (std::size_t j = 0; j < blocks_.size(); ++j)
            lp += static_cast<double>(block_min_distance(x, j)) * log_alphas_[j];
        return lp;
    }

    // Flipping one bit moves the block's zero-count by one; only that
    // block's min-distance term changes.
    double tempered_flip_delta(const BinarySequence& x, std::size_t position,
                               InverseTemperature beta) const override {
        if (position >= length_)
            throw std::invalid_argument("ToyBlockTarget: position out of range");
        const std::size_t j = block_of_[position];
        const Block& b = blocks_[j];
        std::size_t zeros = 0;
        for (std::size_t i = b.begin; i < b.end; ++i) zeros += (x[i] == 0);
        const std::size_t len = b.length();
        const std::size_t zeros_after = x[position] ? zeros + 1 : zeros - 1;
        const auto mind = [len](std::size_t z) { return z < len - z ? z : len - z; };
        const double delta = (static_cast<double>(mind(zeros_after)) -
                              static_cast<double>(mind(zeros))) *
                             log_alphas_[j];
        return beta.value() * delta;
    }

    std::size_t block_min_distance(const BinarySequence& x, std::size_t j) const {
        const Block& b = blocks_[j];
        std::size_t zeros = 0;
        for (std::size_t i = b.begin; i < b.end; ++i) zeros += (x[i] == 0);
        const std::size_t ones = b.length() - zeros;
        return zeros < ones ? zeros : ones;  // min(d to all-ones, d to all-zeros)
    }

  private:
    std::size_t length_;
    std::vector<Block> blocks_;
    std::vector<double> alphas_;
    std::vector<double> log_alphas_;
    std::vector<std::size_t> block_of_;
};

inline double toy_block_log_density(const BinarySequence& x, const ToyBlockTarget& target) {
    return target.log_density(x);
}

// All 2^B sequences with each block set entirely to 0 or entirely to 1.
inline std::vector<BinarySequence> enumerate_modes(const ToyBlockTarget& target) {
    const std::size_t b = target.num_blocks();
    if (b > 20) throw std::length_error("enumerate_modes: more than 2^20 modes");
    std::vector<BinarySequence> modes;
    modes.reserve(std::size_t{1} << b);
    for (std::size_t mask = 0; mask < (std::size_t{1} << b); ++mask) {
        BinarySequence x(target.length(), 0);
        for (std::size_t j = 0; j < b; ++j) {
            if (mask & (std::size_t{1} << j)) {
                const Block& blk = target.blocks()[j];
                for (std::size_t i = blk.begin; i < blk.end; ++i) x.set(i, 1);
            }
        }
        modes.push_back(std::move(x));
    }
    return modes;
}

}  // namespace aemcmc
