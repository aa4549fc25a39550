#pragma once

#include <vector>

#include "sdwnlab/common/rng.hpp"
#include "sdwnlab/numcore/matrix.hpp"

namespace sdwnlab::traffic {

// Gravity-model demand split: demand(i,j) = total * m_i*m_j / sum_{k != l} m_k*m_l.
// Off-diagonal entries sum to total_rate_mbps; the diagonal is zero.
num::matrix gravity_demand(const std::vector<double>& masses, double total_rate_mbps);

// Node attraction masses: uniform with +-jitter around 1.0 (jitter in [0,1)).
std::vector<double> jittered_masses(std::size_t n, double jitter, rng& r);

// Time-of-day activity factor in [0.2, 1.0]: overnight floor, morning ramp
// (06:00-10:00), busy plateau (10:00-15:00), evening ramp down (15:00-22:00).
double diurnal_factor(double hour_of_day);

} // namespace sdwnlab::traffic
