#pragma once

#include <vector>

#include "ccb/conversion.hpp"
#include "ccb/geometry.hpp"

namespace ccb {

// Finite discretization of the body: the axis-aligned grid of spacing eps
// (coordinates at integer multiples of eps) intersected with the body, in
// lexicographic order. Supported bodies: balls, and polytopes whose rows pin
// every axis (boxes).
struct EpsNet {
    std::vector<Vec> points;
    double eps;
};

EpsNet make_eps_net(const ConvexBody& body, double eps);

// UCB over a fixed arm set, selecting by lower confidence bound since arms
// carry losses: any unpulled arm first (lowest index), otherwise
// argmin mean - sqrt(2*log(t_local)/count), ties to the lowest index.
class UcbState {
public:
    explicit UcbState(std::size_t n_arms);

    int select_arm(long long t_local) const;
    void update_arm(int arm, double y);

    std::size_t n_arms() const { return counts_.size(); }
    long long count(int arm) const { return counts_.at(arm); }
    double mean(int arm) const { return means_.at(arm); }
    long long rounds() const { return t_; }

private:
    std::vector<long long> counts_;
    std::vector<double> means_;
    long long t_ = 0;
};

// Router-pluggable eps-net UCB instance.
class EpsNetUcb : public InputAlgorithm {
public:
    explicit EpsNetUcb(EpsNet net);

    Vec propose() override;
    void feed(double y) override;

    const UcbState& ucb() const { return ucb_; }
    const EpsNet& net() const { return net_; }

private:
    EpsNet net_;
    UcbState ucb_;
    int pending_arm_ = -1;
};

} // namespace ccb
