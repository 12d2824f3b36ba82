#pragma once

#include <cstring>
#include <random>
#include <vector>

#include "curlflow/grid.hpp"

namespace testing {

inline curlflow::MacField2 random_field(const curlflow::GridDesc2& g, std::uint64_t seed) {
    curlflow::MacField2 f(g);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (double& v : f.u.data()) v = U(rng);
    for (double& v : f.v.data()) v = U(rng);
    return f;
}

inline curlflow::MacField3 random_field(const curlflow::GridDesc3& g, std::uint64_t seed) {
    curlflow::MacField3 f(g);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (auto* a : {&f.u, &f.v, &f.w})
        for (double& v : a->data()) v = U(rng);
    return f;
}

inline bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace testing
