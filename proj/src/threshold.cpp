#include "gossip/threshold.hpp"

#include <algorithm>
#include <cmath>

namespace gossip {

double id_arrival_rate(const ThresholdParams& params, double n_total) {
    const double v = static_cast<double>(params.view_size);
    const double honest_share = params.c0 / (params.c0 + params.n_byz);
    const double pull = honest_share * honest_share * v;
    const double push =
        params.n_honest / (n_total - 1.0) * honest_share * v;
    return pull + push;
}

double expected_honest_ids(const ThresholdParams& params, double alpha,
                           double t) {
    const double h = params.n_honest;
    return h - (h - params.c0) * std::exp(-alpha * t / h);
}

double chernoff_delta(int view_size, double byz_ratio, double kappa) {
    if (byz_ratio <= 0.0) return 0.0;
    const double mass = view_size * byz_ratio;  // v * B(t)
    const double log_kappa = std::log(kappa);
    return (-log_kappa +
            std::sqrt(log_kappa * log_kappa - 8.0 * mass * log_kappa)) /
           (2.0 * mass);
}

double chernoff_upper_tail(int view_size, double p, double delta) {
    return std::exp(-delta * delta * view_size * p / (delta + 2.0));
}

ThresholdEstimate estimate_threshold(const ThresholdParams& params,
                                     double n_total, double t) {
    ThresholdEstimate est;
    est.t = t;
    est.alpha = id_arrival_rate(params, n_total);
    est.c_t = expected_honest_ids(params, est.alpha, t);
    if (params.n_byz <= 0.0) {
        // Degenerate adversary: nothing to filter.
        est.byz_ratio = 0.0;
        est.delta = 0.0;
        est.b_t = 0.0;
        return est;
    }
    est.byz_ratio = params.n_byz / (params.n_byz + est.c_t);
    est.delta = chernoff_delta(params.view_size, est.byz_ratio, params.kappa);
    const double uncapped =
        (1.0 + est.delta) * params.view_size * est.byz_ratio;
    est.b_t = std::min(uncapped, static_cast<double>(params.view_size - 1));
    return est;
}

}  // namespace gossip
