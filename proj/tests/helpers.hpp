#pragma once

#include <random>

#include "swarm/simulator.hpp"

namespace swarm::test
{
//! Ball(1), d=2, Cucker-Smale(1, 0.5, 10), sigma = sigma_bar = 0.25
inline SimConfig standard_config(int n = 256, double t_final = 1.0)
{
    SimConfig cfg;
    cfg.n = n;
    cfg.d = 2;
    cfg.t_final = t_final;
    cfg.dt = 1e-3;
    cfg.domain = Domain::ball(1.0, 2);
    cfg.kernel = CuckerSmale{1.0, 0.5, 10.0};
    cfg.noise = {0.25, 0.25, 1};
    return cfg;
}

inline Vec random_in_disk(std::mt19937_64& rng, double radius)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    while (true)
    {
        Vec p{u(rng), u(rng), 0};
        if (norm2(p) < 1)
            return radius * p;
    }
}

inline Vec random_vec(std::mt19937_64& rng, double scale, int d = 2)
{
    std::normal_distribution<double> g(0.0, scale);
    Vec v;
    for (int k = 0; k < d; ++k)
        v[k] = g(rng);
    return v;
}

}  // namespace swarm::test
