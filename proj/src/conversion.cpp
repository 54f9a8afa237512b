#include "ccb/conversion.hpp"

#include <cmath>
#include <string>

namespace ccb {

void validate_partition(const Partition& part) {
    if (part.p < 1 || part.K < 1) {
        throw ConfigError("partition: need p >= 1 and K >= 1");
    }
    // K^p must stay addressable as a flat signed 64-bit index.
    if (static_cast<double>(part.p) * std::log2(static_cast<double>(part.K)) > 62.0) {
        throw ConfigError("partition: K^p overflows the flat cell index");
    }
}

long long cell_of(const Partition& part, const Vec& c) {
    validate_partition(part);
    if (c.size() != part.p) {
        throw ConfigError("cell_of: context dimension mismatch");
    }
    long long flat = 0;
    for (int j = 0; j < part.p; ++j) {
        if (!(c(j) >= 0.0 && c(j) <= 1.0)) {
            throw OutOfCube("cell_of: coordinate outside [0,1]");
        }
        const long long idx = std::min(
            static_cast<long long>(std::floor(static_cast<double>(part.K) * c(j))),
            part.K - 1);
        flat = flat * part.K + idx;
    }
    return flat;
}

std::vector<long long> axis_indices(const Partition& part, long long flat) {
    validate_partition(part);
    long long total = 1;
    for (int j = 0; j < part.p; ++j) {
        total *= part.K;
    }
    if (flat < 0 || flat >= total) {
        throw ConfigError("axis_indices: flat cell index out of range");
    }
    std::vector<long long> idx(part.p);
    for (int j = part.p - 1; j >= 0; --j) {
        idx[j] = flat % part.K;
        flat /= part.K;
    }
    return idx;
}

Vec barycenter(const Partition& part, long long flat) {
    const auto idx = axis_indices(part, flat);
    Vec b(part.p);
    for (int j = 0; j < part.p; ++j) {
        b(j) = (static_cast<double>(idx[j]) + 0.5) / static_cast<double>(part.K);
    }
    return b;
}

ConversionParams strongly_convex_preset(double rho, double L, double gamma, double T0) {
    if (rho < 0.0) {
        throw ConfigError("strongly_convex_preset: rho must be >= 0");
    }
    return ConversionParams{1.0 + 0.5 * rho, 0.5, 1.0, T0, L, gamma};
}

long long choose_K(const ConversionParams& params, int d, int p, long long T) {
    if (params.tau2 < 0.0 || params.tau2 >= 1.0) {
        throw ConfigError("choose_K: need tau2 in [0,1)");
    }
    if (params.T0 < 1.0 || params.L < 0.0 || params.gamma <= 0.0 || params.gamma > 1.0) {
        throw ConfigError("choose_K: need T0 >= 1, L >= 0, gamma in (0,1]");
    }
    if (d < 1 || p < 1 || T < 1) {
        throw ConfigError("choose_K: need d, p, T >= 1");
    }
    const double Td = static_cast<double>(T);
    const double inner = params.L * std::pow(static_cast<double>(p), 0.5 * params.gamma) *
                         std::pow(static_cast<double>(d), -params.tau1) *
                         std::pow(Td, 1.0 - params.tau2) /
                         std::pow(std::log(Td + 1.0), params.tau3);
    if (!(inner > 0.0)) {
        return 1;
    }
    const double expo = 1.0 / (static_cast<double>(p) * (1.0 - params.tau2) + params.gamma);
    const double k = std::floor(std::pow(inner, expo));
    return std::max(1LL, static_cast<long long>(k));
}

double expected_bias_bound(double L, double gamma, int p, long long K) {
    if (K < 1) {
        throw ConfigError("expected_bias_bound: need K >= 1");
    }
    return 2.0 * L *
           std::pow(std::sqrt(static_cast<double>(p)) / static_cast<double>(K), gamma);
}

Router::Router(Partition part, Factory factory, SeedStream root)
    : part_(part), factory_(std::move(factory)), root_(root) {
    validate_partition(part_);
    if (!factory_) {
        throw ConfigError("Router: factory is required");
    }
}

long long Router::visit_count(long long cell) const {
    const auto it = cells_.find(cell);
    return it == cells_.end() ? 0 : it->second.n;
}

RouteRecord Router::route_round(const Vec& c, const Observe& observe) {
    const long long flat = cell_of(part_, c);
    auto it = cells_.find(flat);
    if (it == cells_.end()) {
        const std::string tag = std::to_string(flat);
        Cell cell{factory_(root_.derive("cell:" + tag)), 0, root_.derive("noise:" + tag)};
        it = cells_.emplace(flat, std::move(cell)).first;
    }
    Cell& cell = it->second;
    const Vec z = cell.alg->propose();
    const double y = observe(z, cell.noise);
    cell.alg->feed(y);
    cell.n += 1;
    total_ += 1;
    return RouteRecord{total_, flat, cell.n, z, y};
}

} // namespace ccb
