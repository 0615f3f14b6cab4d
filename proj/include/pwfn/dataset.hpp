#pragma once

#include "pwfn/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pwfn {

struct Dataset {
    Matrix x;               // n x features
    std::vector<int> y;     // class indices
    std::size_t classes = 0;
};

struct SyntheticSpec {
    std::size_t n_classes = 3;
    std::size_t n_features = 2;
    std::size_t n_train = 3000;
    std::size_t n_test = 1000;
    double class_separation = 3.0;
    std::uint64_t seed = 123;
};

struct CsvSpec {
    std::string path;
    std::string label_column;
    bool standardize = true;
    double test_fraction = 0.2;
    std::uint64_t seed = 123;
};

struct TrainTest {
    Dataset train;
    Dataset test;
};

// Gaussian blobs: class centers equally spaced on a circle of radius
// class_separation in the first two feature dims, unit variance, labels
// round-robin i mod C. One generator stream fills train then test.
TrainTest make_blobs(const SyntheticSpec& spec);

// Header row required. Labels map to indices by sorted distinct value; the
// split is a seeded shuffle; standardization uses train-split stats only.
TrainTest load_csv(const CsvSpec& spec);

} // namespace pwfn
