#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>

#include "monge/error.hpp"

namespace monge {

/// Order p of the generalised distance D_{M_p}; p in (0, inf].
class PNorm {
public:
    explicit PNorm(double p = 1.0) : p_(p) {
        if (!(p > 0.0)) throw Error(ErrorKind::domain, "p must be positive");
    }
    static PNorm infinity() { return PNorm(std::numeric_limits<double>::infinity()); }

    double value() const { return p_; }
    bool is_infinite() const { return std::isinf(p_); }
    bool operator==(const PNorm&) const = default;

private:
    double p_;
};

inline std::string to_string(PNorm p) {
    if (p.is_infinite()) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", p.value());
    return buf;
}

enum class Method { analytic, salvemini, transport };

inline const char* to_string(Method m) {
    switch (m) {
    case Method::analytic: return "analytic";
    case Method::salvemini: return "salvemini";
    case Method::transport: return "transport";
    }
    return "unknown";
}

struct DistanceResult {
    double value = 0.0;
    Method method = Method::analytic;
    PNorm p{1.0};
    std::map<std::string, double> diagnostics;
};

} // namespace monge
