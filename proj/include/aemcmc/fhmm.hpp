#pragma once

// Factorial HMM: K independent binary Markov rows driving additive
// Gaussian observations. Tempering applies to the emission likelihood
// only; the Markov prior stays cold.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

#include "aemcmc/binary.hpp"
#include "aemcmc/target.hpp"

namespace aemcmc {

inline double gaussian_log_pdf(double y, double mean, double variance) {
    constexpr double kLog2Pi = 1.8378770664093454836;
    const double r = y - mean;
    return -0.5 * (kLog2Pi + std::log(variance) + r * r / variance);
}

// Per-row initial distribution p(x_{k,1}=1) and 2x2 transition matrix.
// Log probabilities are precomputed; lookups sit in sampler hot loops.
class MarkovChainPrior {
  public:
    struct RowParams {
        double init_p1;
        double trans[2][2];  // trans[from][to]
    };

    explicit MarkovChainPrior(std::vector<RowParams> rows) : rows_(std::move(rows)) {
        if (rows_.empty()) throw std::invalid_argument("MarkovChainPrior: K must be >= 1");
        logs_.reserve(rows_.size());
        for (const RowParams& r : rows_) {
            if (r.init_p1 < 0.0 || r.init_p1 > 1.0)
                throw std::invalid_argument("MarkovChainPrior: initial probability outside [0,1]");
            for (int from = 0; from < 2; ++from) {
                for (int to = 0; to < 2; ++to)
                    if (r.trans[from][to] < 0.0 || r.trans[from][to] > 1.0)
                        throw std::invalid_argument(
                            "MarkovChainPrior: transition probability outside [0,1]");
                if (std::abs(r.trans[from][0] + r.trans[from][1] - 1.0) > 1e-12)
                    throw std::invalid_argument(
                        "MarkovChainPrior: transition rows must sum to 1");
            }
            RowLogs lg;
            lg.init[1] = std::log(r.init_p1);
            lg.init[0] = std::log(1.0 - r.init_p1);
            for (int from = 0; from < 2; ++from)
                for (int to = 0; to < 2; ++to) lg.trans[from][to] = std::log(r.trans[from][to]);
            logs_.push_back(lg);
        }
    }

    // K identical rows with the given self-transition probability.
    static MarkovChainPrior homogeneous(std::size_t k, double self_prob, double init_p1 = 0.5) {
        RowParams r;
        r.init_p1 = init_p1;
        r.trans[0][0] = self_prob;
        r.trans[0][1] = 1.0 - self_prob;
        r.trans[1][1] = self_prob;
        r.trans[1][0] = 1.0 - self_prob;
        return MarkovChainPrior(std::vector<RowParams>(k, r));
    }

    std::size_t num_rows() const { return rows_.size(); }
    double init_prob(std::size_t k, Bit b) const {
        return b ? rows_[k].init_p1 : 1.0 - rows_[k].init_p1;
    }
    double trans_prob(std::size_t k, Bit from, Bit to) const { return rows_[k].trans[from][to]; }
    double log_init(std::size_t k, Bit b) const { return logs_[k].init[b]; }
    double log_trans(std::size_t k, Bit from, Bit to) const { return logs_[k].trans[from][to]; }
    const std::vector<RowParams>& rows() const { return rows_; }

  private:
    struct RowLogs {
        double init[2];
        double trans[2][2];
    };

    std::vector<RowParams> rows_;
    std::vector<RowLogs> logs_;
};

namespace detail {
inline void check_weights(const std::vector<double>& w) {
    if (w.empty()) throw std::invalid_argument("emission: need at least one weight");
    double sum = 0.0;
    for (double wk : w) {
        if (wk < 0.0) throw std::invalid_argument("emission: weights must be non-negative");
        sum += wk;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("emission: weights must sum to 1");
}
}  // namespace detail

// y_t | x_t ~ N(h * sum_k w_k x_{k,t}, sigma2)
struct AdditiveGaussianEmission {
    std::vector<double> w;
    double h;
    double sigma2;

    AdditiveGaussianEmission(std::vector<double> weights, double depth, double noise_var)
        : w(std::move(weights)), h(depth), sigma2(noise_var) {
        detail::check_weights(w);
        if (!(sigma2 > 0.0)) throw std::invalid_argument("emission: sigma2 must be > 0");
        log_norm_ = -0.5 * (1.8378770664093454836 + std::log(sigma2));
        half_precision_ = 0.5 / sigma2;
    }

    double log_lik_s(double y, double s) const {
        const double r = y - h * s;
        return log_norm_ - r * r * half_precision_;
    }

  private:
    double log_norm_;
    double half_precision_;
};

// Depth h integrated out under h ~ N(mu_h, sigma2_h):
// y_t | x_t ~ N(mu_h * s, sigma2 + sigma2_h * s^2) with s = sum_k w_k x_{k,t}.
struct MarginalizedDepthEmission {
    std::vector<double> w;
    double mu_h;
    double sigma2_h;
    double sigma2;

    MarginalizedDepthEmission(std::vector<double> weights, double depth_mean, double depth_var,
                              double noise_var)
        : w(std::move(weights)), mu_h(depth_mean), sigma2_h(depth_var), sigma2(noise_var) {
        detail::check_weights(w);
        if (sigma2_h < 0.0) throw std::invalid_argument("emission: sigma2_h must be >= 0");
        if (!(sigma2 > 0.0)) throw std::invalid_argument("emission: sigma2 must be > 0");
    }

    double log_lik_s(double y, double s) const {
        return gaussian_log_pdf(y, mu_h * s, sigma2 + sigma2_h * s * s);
    }
};

using Emission = std::variant<AdditiveGaussianEmission, MarginalizedDepthEmission>;

inline const std::vector<double>& emission_weights(const Emission& em) {
    return std::visit([](const auto& e) -> const std::vector<double>& { return e.w; }, em);
}

inline double emission_log_lik_s(const Emission& em, double y, double s) {
    return std::visit([&](const auto& e) { return e.log_lik_s(y, s); }, em);
}

namespace detail {
inline double weighted_sum(const std::vector<Bit>& col, const std::vector<double>& w) {
    if (col.size() != w.size())
        throw std::invalid_argument("emission: column length must equal weight count");
    double s = 0.0;
    for (std::size_t k = 0; k < col.size(); ++k)
        if (col[k]) s += w[k];
    return s;
}
}  // namespace detail

inline double additive_gaussian_log_lik(double y_t, const std::vector<Bit>& x_t,
                                        const AdditiveGaussianEmission& em) {
    return em.log_lik_s(y_t, detail::weighted_sum(x_t, em.w));
}

inline double marginalized_gaussian_log_lik(double y_t, const std::vector<Bit>& x_t,
                                            const MarginalizedDepthEmission& em) {
    return em.log_lik_s(y_t, detail::weighted_sum(x_t, em.w));
}

struct FhmmModel {
    MarkovChainPrior prior;
    Emission emission;
    std::vector<double> y;
    std::vector<std::size_t> fixed_rows;  // pinned to constant 1, never resampled

    FhmmModel(MarkovChainPrior p, Emission em, std::vector<double> obs,
              std::vector<std::size_t> fixed = {})
        : prior(std::move(p)), emission(std::move(em)), y(std::move(obs)),
          fixed_rows(std::move(fixed)) {
        if (emission_weights(emission).size() != prior.num_rows())
            throw std::invalid_argument("FhmmModel: emission weight count must equal K");
        if (y.empty()) throw std::invalid_argument("FhmmModel: need T >= 1 observations");
        for (std::size_t k : fixed_rows)
            if (k >= prior.num_rows())
                throw std::invalid_argument("FhmmModel: fixed row index out of range");
    }

    std::size_t num_rows() const { return prior.num_rows(); }
    std::size_t num_cols() const { return y.size(); }
    const std::vector<double>& weights() const { return emission_weights(emission); }

    bool is_fixed(std::size_t k) const {
        for (std::size_t f : fixed_rows)
            if (f == k) return true;
        return false;
    }

    void check_shape(const BinaryMatrix& x) const {
        if (x.rows() != num_rows() || x.cols() != num_cols())
            throw std::invalid_argument("FhmmModel: state shape mismatch");
    }

    // Column weighted sums s_t = sum_k w_k x_{k,t}.
    std::vector<double> column_sums(const BinaryMatrix& x) const {
        check_shape(x);
        const std::vector<double>& w = weights();
        std::vector<double> s(num_cols(), 0.0);
        for (std::size_t k = 0; k < num_rows(); ++k)
            for (std::size_t t = 0; t < num_cols(); ++t)
                if (x(k, t)) s[t] += w[k];
        return s;
    }
};

inline double fhmm_log_prior(const BinaryMatrix& x, const MarkovChainPrior& prior) {
    if (x.rows() != prior.num_rows())
        throw std::invalid_argument("fhmm_log_prior: row count mismatch");
    double lp = 0.0;
    for (std::size_t k = 0; k < x.rows(); ++k) {
        lp += prior.log_init(k, x(k, 0));
        for (std::size_t t = 1; t < x.cols(); ++t) lp += prior.log_trans(k, x(k, t - 1), x(k, t));
    }
    return lp;
}

inline double fhmm_log_likelihood(const BinaryMatrix& x, const FhmmModel& model) {
    const std::vector<double> s = model.column_sums(x);
    double ll = 0.0;
    for (std::size_t t = 0; t < model.num_cols(); ++t)
        ll += emission_log_lik_s(model.emission, model.y[t], s[t]);
    return ll;
}

// log p(X) + beta * log p(y | X); the prior is never tempered.
inline double fhmm_log_posterior(const BinaryMatrix& x, const FhmmModel& model,
                                 InverseTemperature beta) {
    return fhmm_log_prior(x, model.prior) + beta.value() * fhmm_log_likelihood(x, model);
}

class FhmmTarget : public TargetDensity<BinaryMatrix> {
  public:
    explicit FhmmTarget(FhmmModel model) : model_(std::move(model)) {}

    const FhmmModel& model() const { return model_; }

    double log_density(const BinaryMatrix& x) const override {
        return fhmm_log_prior(x, model_.prior) + fhmm_log_likelihood(x, model_);
    }

    double tempered_log_density(const BinaryMatrix& x, InverseTemperature beta) const override {
        return fhmm_log_posterior(x, model_, beta);
    }

  private:
    FhmmModel model_;
};

}  // namespace aemcmc
