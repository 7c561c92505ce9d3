#include "cross/switching.hpp"

#include <algorithm>

namespace cross {

double herding_switch_prob(double c, const ModelParams& p) {
    const double lo = p.herding_lo(), hi = p.herding_hi();
    if (hi <= lo) return c <= lo ? 0.0 : 1.0;
    return std::clamp((c - lo) / (hi - lo), 0.0, 1.0);
}

double inaction_switch_prob(double m, double s, const ModelParams& p) {
    const double m1 = m / (1.0 + p.a2);
    const double m2 = m / (1.0 + p.a1);
    const double m3 = m * (1.0 + p.a1);
    const double m4 = m * (1.0 + p.a2);
    // The two ramps have disjoint support (m2 < m3), so their clamped sum
    // reproduces every branch of the piecewise definition.
    const double down = std::clamp((m2 - s) / (m2 - m1), 0.0, 1.0);
    const double up = std::clamp((s - m3) / (m4 - m3), 0.0, 1.0);
    return down + up;
}

double switching_probability(double c, double m, double s, const ModelParams& p) {
    return p.lambda1 * herding_switch_prob(c, p) + p.lambda2 * inaction_switch_prob(m, s, p);
}

double switching_rate(double c, double m, double s, const ModelParams& p) {
    return switching_probability(c, m, s, p) / p.dt_cross;
}

}  // namespace cross
