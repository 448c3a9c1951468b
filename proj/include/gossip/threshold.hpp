#pragma once

namespace gossip {

// Inputs of the analytic Byzantine-presence model. c0 is the expected
// number of honest identifiers in a freshly bootstrapped history; the
// adversary count is assumed known as a system parameter.
struct ThresholdParams {
    double n_honest = 0;   // |H|
    double n_byz = 0;      // B
    double c0 = 1;         // initial honest-id count, >= 1
    int view_size = 0;     // v
    double kappa = 1e-3;   // target failure probability, in (0,1)
};

// Per-round analytic quantities.
struct ThresholdEstimate {
    double t = 0;
    double alpha = 0;      // honest-id arrival rate
    double c_t = 0;        // expected unique honest ids in history
    double byz_ratio = 0;  // B(t) = B / (B + c(t))
    double delta = 0;      // Chernoff slack solving the tail at kappa
    double b_t = 0;        // filtering threshold, capped at v - 1
};

// Combined honest-id arrival rate: a pull from a uniformly chosen
// neighbor plus the mean-field push traffic, both evaluated at the
// worst-case (initial) honest/Byzantine mix.
//   alpha_pull = (c0 / (c0 + B))^2 * v
//   alpha_push = |H| / (n - 1) * (c0 / (c0 + B)) * v
double id_arrival_rate(const ThresholdParams& params, double n_total);

// Closed-form solution of dc/dt = alpha * (|H| - c) / |H|:
//   c(t) = |H| - (|H| - c0) * exp(-alpha * t / |H|)
double expected_honest_ids(const ThresholdParams& params, double alpha,
                           double t);

// Smallest delta > 0 with exp(-delta^2 * v * p / (delta + 2)) <= kappa,
// i.e. the positive root of p*v*delta^2 + ln(kappa)*delta + 2*ln(kappa).
// Returns 0 when p == 0 (degenerate: no adversary).
double chernoff_delta(int view_size, double byz_ratio, double kappa);

// Upper-tail bound exp(-delta^2 * v * p / (delta + 2)).
double chernoff_upper_tail(int view_size, double p, double delta);

// Full pipeline for round t: alpha, c(t), B(t), delta, and
// b(t) = min((1 + delta) * v * B(t), v - 1).
ThresholdEstimate estimate_threshold(const ThresholdParams& params,
                                     double n_total, double t);

}  // namespace gossip
