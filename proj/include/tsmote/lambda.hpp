#pragma once

#include <string>

#include "tsmote/random.hpp"

namespace tsmote {

/// Distribution of the interpolation weight between a seed value and its
/// neighbour. Support is always within [0, 1].
class LambdaSpec {
public:
    enum class Kind { uniform01, beta, point_mass };

    static LambdaSpec uniform();
    static LambdaSpec beta(double a, double b);
    static LambdaSpec point_mass(double c);

    /// Parses "uniform", "beta:A,B" or "point:C".
    static LambdaSpec parse(const std::string& text);

    Kind kind() const { return kind_; }
    double a() const { return a_; }
    double b() const { return b_; }

    double mean() const;
    double second_moment() const;
    double variance() const;

    double sample(Rng& rng) const;

    std::string to_string() const;

private:
    LambdaSpec(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

    Kind kind_;
    double a_;
    double b_;
};

} // namespace tsmote
