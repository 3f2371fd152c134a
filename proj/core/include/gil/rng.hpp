#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "gil/tensor.hpp"

namespace gil {

/// Seeded random stream. Every stochastic choice in the toolkit draws from one
/// of these so that a (seed, call-order) pair fully determines the result.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(engine_);
    }
    double normal(double mean, double stddev) {
        std::normal_distribution<double> d(mean, stddev);
        return d(engine_);
    }
    // inclusive bounds
    int uniform_int(int lo, int hi) {
        std::uniform_int_distribution<int> d(lo, hi);
        return d(engine_);
    }
    bool bernoulli(double p) {
        std::bernoulli_distribution d(p);
        return d(engine_);
    }
    std::uint64_t next_u64() { return engine_(); }

    template <class T>
    void shuffle(std::vector<T>& xs) {
        for (size_t i = xs.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_int(0, static_cast<int>(i) - 1));
            std::swap(xs[i - 1], xs[j]);
        }
    }

    Tensor uniform_tensor(int rows, int cols, double lo, double hi) {
        Tensor t(rows, cols);
        for (auto& x : t.v) x = uniform(lo, hi);
        return t;
    }
    Tensor normal_tensor(int rows, int cols, double mean, double stddev) {
        Tensor t(rows, cols);
        for (auto& x : t.v) x = normal(mean, stddev);
        return t;
    }
    /// Fan-scaled uniform init: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    Tensor fan_uniform(int rows, int cols, int fan_in) {
        double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
        return uniform_tensor(rows, cols, -s, s);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace gil
