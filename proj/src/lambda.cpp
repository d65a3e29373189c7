#include "tsmote/lambda.hpp"

#include <cmath>
#include <sstream>

#include "tsmote/error.hpp"
#include "tsmote/io.hpp"

namespace tsmote {

LambdaSpec LambdaSpec::uniform() { return LambdaSpec(Kind::uniform01, 0.0, 1.0); }

LambdaSpec LambdaSpec::beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw ConfigError("beta lambda needs positive finite shape parameters");
    }
    return LambdaSpec(Kind::beta, a, b);
}

LambdaSpec LambdaSpec::point_mass(double c) {
    if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("point-mass lambda must lie in [0, 1]");
    return LambdaSpec(Kind::point_mass, c, c);
}

LambdaSpec LambdaSpec::parse(const std::string& text) {
    auto number = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("bad lambda specification '" + text + "'");
        }
    };
    if (text == "uniform" || text == "uniform01") return uniform();
    if (text.rfind("beta:", 0) == 0) {
        const auto body = text.substr(5);
        const auto comma = body.find(',');
        if (comma == std::string::npos) throw ConfigError("beta lambda expects 'beta:A,B'");
        return beta(number(body.substr(0, comma)), number(body.substr(comma + 1)));
    }
    if (text.rfind("point:", 0) == 0) return point_mass(number(text.substr(6)));
    throw ConfigError("unknown lambda distribution '" + text + "' (uniform | beta:A,B | point:C)");
}

double LambdaSpec::mean() const {
    switch (kind_) {
    case Kind::uniform01: return 0.5;
    case Kind::beta: return a_ / (a_ + b_);
    case Kind::point_mass: return a_;
    }
    return 0.0;
}

double LambdaSpec::variance() const {
    switch (kind_) {
    case Kind::uniform01: return 1.0 / 12.0;
    case Kind::beta: {
        const double s = a_ + b_;
        return a_ * b_ / (s * s * (s + 1.0));
    }
    case Kind::point_mass: return 0.0;
    }
    return 0.0;
}

double LambdaSpec::second_moment() const {
    const double m = mean();
    return variance() + m * m;
}

double LambdaSpec::sample(Rng& rng) const {
    switch (kind_) {
    case Kind::uniform01: return uniform01(rng);
    case Kind::beta: {
        std::gamma_distribution<double> ga(a_, 1.0);
        std::gamma_distribution<double> gb(b_, 1.0);
        const double x = ga(rng);
        const double y = gb(rng);
        return x / (x + y);
    }
    case Kind::point_mass: return a_;
    }
    return 0.0;
}

std::string LambdaSpec::to_string() const {
    switch (kind_) {
    case Kind::uniform01: return "uniform";
    case Kind::beta: return "beta:" + format_double(a_) + "," + format_double(b_);
    case Kind::point_mass: return "point:" + format_double(a_);
    }
    return {};
}

} // namespace tsmote
