#include "sdwnlab/traffic/gravity.hpp"

#include <cmath>

#include "sdwnlab/common/error.hpp"

namespace sdwnlab::traffic {

num::matrix gravity_demand(const std::vector<double>& masses, double total_rate_mbps) {
    const std::size_t n = masses.size();
    if (n < 2) throw config_error("gravity_demand: need at least 2 nodes");
    if (total_rate_mbps < 0.0) throw config_error("gravity_demand: negative total rate");
    double mass_sum = 0.0, sq_sum = 0.0;
    for (double m : masses) {
        if (!(m >= 0.0) || !std::isfinite(m)) throw config_error("gravity_demand: masses must be finite and >= 0");
        mass_sum += m;
        sq_sum += m * m;
    }
    const double pair_weight = mass_sum * mass_sum - sq_sum; // sum over ordered pairs k != l
    if (pair_weight <= 0.0) throw config_error("gravity_demand: masses admit no node pair with weight");

    num::matrix d(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) d(i, j) = total_rate_mbps * masses[i] * masses[j] / pair_weight;
    return d;
}

std::vector<double> jittered_masses(std::size_t n, double jitter, rng& r) {
    if (jitter < 0.0 || jitter >= 1.0) throw config_error("jittered_masses: jitter must be in [0,1)");
    std::vector<double> m(n);
    for (auto& v : m) v = r.uniform(1.0 - jitter, 1.0 + jitter);
    return m;
}

double diurnal_factor(double hour_of_day) {
    double h = std::fmod(hour_of_day, 24.0);
    if (h < 0.0) h += 24.0;
    constexpr double floor_level = 0.2, peak = 1.0;
    if (h < 6.0) return floor_level;
    if (h < 10.0) return floor_level + (peak - floor_level) * (h - 6.0) / 4.0;
    if (h < 15.0) return peak;
    if (h < 22.0) return peak - (peak - floor_level) * (h - 15.0) / 7.0;
    return floor_level;
}

} // namespace sdwnlab::traffic
