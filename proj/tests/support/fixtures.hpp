#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "recfact/linalg.hpp"
#include "recfact/random.hpp"
#include "recfact/ratings.hpp"

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(RECFACT_FIXTURES) + "/" + name; }

// Comma-separated numeric rows; '#' lines skipped.
inline std::vector<std::vector<double>> read_rows(const std::string& name)
{
    std::ifstream in(path(name));
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

inline recfact::DenseMatrix read_matrix(const std::string& name)
{
    const auto rows = read_rows(name);
    std::vector<double> data;
    for (const auto& r : rows)
        data.insert(data.end(), r.begin(), r.end());
    return recfact::DenseMatrix::from_rows(rows.size(), rows[0].size(), data);
}

inline recfact::RatingDataset worked_ratings()
{
    std::ifstream in(path("worked_ratings.csv"));
    return recfact::parse_csv(in);
}

// Noiseless rank-2 ratings: p_u, q_i uniform in [0.75, 1.55]^2 so every
// product lands inside [1, 5]. Each cell observed with probability `density`.
// Optional Gaussian noise, clamped to the scale.
inline recfact::RatingDataset rank2(std::size_t users = 50, std::size_t items = 40, double density = 0.6,
                                    std::uint64_t seed = 42, double noise = 0.0)
{
    recfact::Rng rng(seed);
    std::vector<double> p(users * 2);
    std::vector<double> q(items * 2);
    for (double& x : p)
        x = rng.uniform(0.75, 1.55);
    for (double& x : q)
        x = rng.uniform(0.75, 1.55);
    recfact::DatasetBuilder b;
    for (std::size_t u = 0; u < users; ++u)
        for (std::size_t i = 0; i < items; ++i) {
            const bool seen = rng.uniform() < density;
            double r = p[2 * u] * q[2 * i] + p[2 * u + 1] * q[2 * i + 1];
            if (noise > 0.0) {
                const double a = 1.0 - rng.uniform();
                const double c = rng.uniform();
                r += noise * std::sqrt(-2.0 * std::log(a)) * std::cos(2.0 * M_PI * c);
                r = std::clamp(r, 1.0, 5.0);
            }
            if (seen)
                b.add("u" + std::to_string(u), "i" + std::to_string(i), r);
        }
    return std::move(b).build();
}

// Ratings drawn from a biased latent model with an implicit-feedback term:
// r = 3 + b_u + b_i + q_i . (p_u + |N(u)|^-1/2 sum_{j in N(u)} y_j),
// where N(u) is the user's observed item set.
inline recfact::RatingDataset svdpp_synthetic(std::size_t users = 30, std::size_t items = 20, double density = 0.6,
                                              std::uint64_t seed = 7)
{
    recfact::Rng rng(seed);
    const std::size_t f = 2;
    std::vector<double> bu(users), bi(items), p(users * f), q(items * f), y(items * f);
    for (double& x : bu)
        x = rng.uniform(-0.4, 0.4);
    for (double& x : bi)
        x = rng.uniform(-0.4, 0.4);
    for (double& x : p)
        x = rng.uniform(-0.5, 0.5);
    for (double& x : q)
        x = rng.uniform(-0.5, 0.5);
    for (double& x : y)
        x = rng.uniform(-0.5, 0.5);
    std::vector<std::vector<std::size_t>> seen(users);
    for (std::size_t u = 0; u < users; ++u)
        for (std::size_t i = 0; i < items; ++i)
            if (rng.uniform() < density)
                seen[u].push_back(i);
    recfact::DatasetBuilder b;
    for (std::size_t u = 0; u < users; ++u) {
        double z[2] = {p[u * f], p[u * f + 1]};
        if (!seen[u].empty()) {
            const double s = 1.0 / std::sqrt(static_cast<double>(seen[u].size()));
            for (std::size_t j : seen[u])
                for (std::size_t k = 0; k < f; ++k)
                    z[k] += s * y[j * f + k];
        }
        for (std::size_t i : seen[u]) {
            const double r = 3.0 + bu[u] + bi[i] + q[i * f] * z[0] + q[i * f + 1] * z[1];
            b.add("u" + std::to_string(u), "i" + std::to_string(i), r);
        }
    }
    return std::move(b).build();
}

} // namespace fixtures
