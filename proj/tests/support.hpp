#pragma once

#include <map>
#include <random>
#include <utility>

#include "tvortex/green.hpp"

namespace tvortex::testing {

// Tables are expensive at n = 1024, so each test binary builds them once.
inline const GreenTable& table(int n = kDefaultTableSize, double rc = kDefaultCutoff) {
    static std::map<std::pair<int, double>, GreenTable> cache;
    auto it = cache.find({n, rc});
    if (it == cache.end()) it = cache.emplace(std::pair{n, rc}, build_table(n, rc)).first;
    return it->second;
}

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240611);
    return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

}  // namespace tvortex::testing
