#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "recfact/random.hpp"
#include "recfact/ratings.hpp"

namespace oracles {

// Plain arrays, no library types, so trainers can be checked against them.
struct FunkState {
    std::size_t factors = 0;
    std::vector<double> p; // users x factors
    std::vector<double> q; // items x factors
};

inline FunkState funk_init(std::size_t users, std::size_t items, std::size_t f, std::uint64_t seed)
{
    recfact::Rng rng(seed);
    FunkState s{f, std::vector<double>(users * f), std::vector<double>(items * f)};
    for (double& x : s.p)
        x = rng.uniform() / std::sqrt(static_cast<double>(f));
    for (double& x : s.q)
        x = rng.uniform() / std::sqrt(static_cast<double>(f));
    return s;
}

// The textbook loop: err = r - p.q, then for each k
//   p_k += alpha (q_k err - lambda p_k);  q_k += alpha (p_k err - lambda q_k)
// with the q step reading the p value just written.
inline void funk_sgd(FunkState& s, std::span<const recfact::Rating> triples, double alpha, double lambda,
                     std::size_t epochs)
{
    const std::size_t f = s.factors;
    for (std::size_t e = 0; e < epochs; ++e)
        for (const auto& r : triples) {
            double* p = &s.p[r.user * f];
            double* q = &s.q[r.item * f];
            double pred = 0.0;
            for (std::size_t k = 0; k < f; ++k)
                pred += p[k] * q[k];
            const double err = r.value - pred;
            for (std::size_t k = 0; k < f; ++k) {
                p[k] += alpha * (q[k] * err - lambda * p[k]);
                q[k] += alpha * (p[k] * err - lambda * q[k]);
            }
        }
}

} // namespace oracles
