#pragma once

#include <string>

#include "tdgan/evalharness.hpp"

namespace tdgan {

struct SuiteResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string detail;
};

// Trains a fresh discriminator to separate N(0,1) from N(1,1) and compares
// it to the closed-form optimum p/(p+q) on a 201-point grid over [-4, 5].
SuiteResult lemma2_suite(uint64_t seed = 1);

// Optimizes only the squared-deviation consistency loss from a random
// generator toward a frozen one and reports the final loss.
SuiteResult lemma1_suite(uint64_t seed = 1);

}  // namespace tdgan
