#include <doctest.h>

#include "gil/error.hpp"
#include "gil/metrics.hpp"

using namespace gil;
using namespace gil::train;

TEST_CASE("accuracy") {
    std::vector<int> pred{0, 1, 1, 0};
    std::vector<int> labels{0, 1, 0, 0};
    CHECK(accuracy(pred, labels, {0, 1, 2, 3}) == doctest::Approx(0.75));
    CHECK(accuracy(pred, labels, {2}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(accuracy(pred, labels, {}), ContractViolation);
}

TEST_CASE("f1_binary") {
    // tp=2, fp=1, fn=1: precision 2/3, recall 2/3, f1 = 2/3
    std::vector<int> pred{1, 1, 1, 0, 0};
    std::vector<int> labels{1, 1, 0, 1, 0};
    CHECK(f1_binary(pred, labels, {0, 1, 2, 3, 4}) == doctest::Approx(2.0 / 3.0));
    // no true positives
    CHECK(f1_binary({0, 0}, {1, 1}, {0, 1}) == 0.0);
    // perfect prediction
    CHECK(f1_binary({1, 0, 1}, {1, 0, 1}, {0, 1, 2}) == doctest::Approx(1.0));
}

TEST_CASE("roc_auc point cases") {
    // perfect separation
    CHECK(roc_auc({0.9, 0.8}, {0.2, 0.1}) == doctest::Approx(1.0));
    // identical distributions: all ties
    CHECK(roc_auc({0.5, 0.5}, {0.5, 0.5}) == doctest::Approx(0.5));

    // enumerating the four pairs: 0.9>0.5, 0.9>0.1, 0.4<0.5, 0.4>0.1 -> 3/4
    CHECK(roc_auc({0.9, 0.4}, {0.5, 0.1}) == doctest::Approx(0.75));
    // with a tie (0.4 vs 0.4 counts 0.5): 3.5/4
    CHECK(roc_auc({0.9, 0.4}, {0.4, 0.1}) == doctest::Approx(0.875));

    CHECK_THROWS_AS(roc_auc({}, {0.5}), ContractViolation);
}
