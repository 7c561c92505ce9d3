#pragma once

#include <cstdint>

#include "cross/params.hpp"

namespace cross {

/// Which psychological pressures drive an experiment arm. For the mean-field
/// tier inaction_only selects the space-homogeneous model (no herding
/// transport, rate q/dt_cross); full selects the heterogeneous model.
enum class PressureArm { inaction_only, full };

/// Herding pressure rule: the pressure grows by dt*|ED| while the agent holds
/// the minority position (gamma*ED < 0), otherwise it is unchanged.
inline double herding_pressure_step(double c, int gamma, double ed, double dt) {
    return gamma * ed < 0.0 ? c + dt * (ed < 0.0 ? -ed : ed) : c;
}

/// Probability of a herding-driven switch: the CDF of Unif(B1,B2) at c.
/// Degenerate B1 == B2 collapses to a step at B1.
double herding_switch_prob(double c, const ModelParams& p);

/// Probability of an inaction-driven switch for memory m and price s.
/// With M1 = m/(1+A2) < M2 = m/(1+A1) < M3 = m(1+A1) < M4 = m(1+A2):
/// 1 outside [M1,M4], 0 on (M2,M3), linear ramps between.
double inaction_switch_prob(double m, double s, const ModelParams& p);

/// lambda_P = lambda1*p(c) + lambda2*q(m,s), a probability in [0,1].
double switching_probability(double c, double m, double s, const ModelParams& p);

/// Switching rate lambda = lambda_P / dt_cross (units 1/time).
double switching_rate(double c, double m, double s, const ModelParams& p);

}  // namespace cross
