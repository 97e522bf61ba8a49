#pragma once

#include <doctest.h>

#include <limits>

/// Relative comparison; doctest::Approx adds an absolute floor of eps by
/// default. The floor kept here only lets exact zeros compare equal.
inline doctest::Approx rel(double value, double tolerance) {
    return doctest::Approx(value).epsilon(tolerance).scale(std::numeric_limits<double>::min());
}
