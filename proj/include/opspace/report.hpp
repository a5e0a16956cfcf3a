#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace opspace {

/// Two sides of an inequality lhs <= rhs, plus their ratio.
struct RatioReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    std::string inequality;

    static RatioReport make(double lhs, double rhs, std::string inequality) {
        RatioReport r{lhs, rhs, 0.0, std::move(inequality)};
        if (rhs > 0.0)
            r.ratio = lhs / rhs;
        else
            r.ratio = lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        return r;
    }

    /// ratio <= 1 + slack.
    bool holds(double slack = 1e-9) const { return ratio <= 1.0 + slack; }
};

}  // namespace opspace
