// Small random generators for property tests.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "monge/states.hpp"

namespace monge::proptest {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::size_t index(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
    PhasePoint point(double r) { return {uniform(-r, r), uniform(-r, r)}; }

    std::vector<PhasePoint> points(std::size_t n, double r) {
        std::vector<PhasePoint> v(n);
        for (auto& x : v) x = point(r);
        return v;
    }
    // Positive masses summing to one.
    std::vector<double> masses(std::size_t n) {
        std::vector<double> v(n);
        double s = 0.0;
        for (auto& x : v) s += (x = uniform(0.05, 1.0));
        for (auto& x : v) x /= s;
        return v;
    }
    StateSpec state() {
        switch (index(0, 3)) {
        case 0: return Coherent{point(1.5)};
        case 1: return Squeezed{uniform(0.0, 1.5), uniform(0.0, 3.14), point(1.0)};
        case 2: return Fock{static_cast<std::uint32_t>(index(0, 5))};
        default: return Thermal{uniform(0.0, 4.0)};
        }
    }
    StateSpec symmetric_state() {
        switch (index(0, 2)) {
        case 0: return Coherent{};
        case 1: return Fock{static_cast<std::uint32_t>(index(0, 8))};
        default: return Thermal{uniform(0.0, 10.0)};
        }
    }
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

} // namespace monge::proptest
