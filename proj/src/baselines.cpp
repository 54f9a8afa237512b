#include "ccb/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccb/errors.hpp"

namespace ccb {

EpsNet make_eps_net(const ConvexBody& body, double eps) {
    if (!(eps > 0.0)) throw ConfigError("eps-net: eps must be positive");
    const int d = body.dim();
    Vec lo, hi;
    axis_bounding_box(body, lo, hi);

    std::vector<long long> idx_lo(d), idx_hi(d);
    for (int i = 0; i < d; ++i) {
        idx_lo[i] = static_cast<long long>(std::ceil(lo(i) / eps - 1e-12));
        idx_hi[i] = static_cast<long long>(std::floor(hi(i) / eps + 1e-12));
        if (idx_hi[i] < idx_lo[i]) return EpsNet{{}, eps};
    }

    EpsNet net;
    net.eps = eps;
    std::vector<long long> idx(idx_lo);
    Vec point(d);
    while (true) {
        for (int i = 0; i < d; ++i) point(i) = static_cast<double>(idx[i]) * eps;
        if (body.contains(point)) net.points.push_back(point);
        int axis = d - 1;
        while (axis >= 0) {
            if (++idx[axis] <= idx_hi[axis]) break;
            idx[axis] = idx_lo[axis];
            --axis;
        }
        if (axis < 0) break;
    }
    return net;
}

UcbState::UcbState(std::size_t n_arms) : counts_(n_arms, 0), means_(n_arms, 0.0) {
    if (n_arms == 0) throw ConfigError("UCB: arm set is empty");
}

int UcbState::select_arm(long long t_local) const {
    const int n = static_cast<int>(counts_.size());
    for (int a = 0; a < n; ++a) {
        if (counts_[a] == 0) return a;
    }
    const double logt = std::log(std::max<long long>(t_local, 2));
    int best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
        const double score =
            means_[a] - std::sqrt(2.0 * logt / static_cast<double>(counts_[a]));
        if (score < best_score) {
            best_score = score;
            best = a;
        }
    }
    return best;
}

void UcbState::update_arm(int arm, double y) {
    auto& c = counts_.at(arm);
    ++c;
    ++t_;
    means_.at(arm) += (y - means_.at(arm)) / static_cast<double>(c);
}

EpsNetUcb::EpsNetUcb(EpsNet net) : net_(std::move(net)), ucb_(net_.points.size()) {}

Vec EpsNetUcb::propose() {
    if (pending_arm_ >= 0) throw PendingQuery("eps-net UCB: outstanding query");
    pending_arm_ = ucb_.select_arm(ucb_.rounds() + 1);
    return net_.points.at(pending_arm_);
}

void EpsNetUcb::feed(double y) {
    if (pending_arm_ < 0) throw PendingQuery("eps-net UCB: no outstanding query");
    ucb_.update_arm(pending_arm_, y);
    pending_arm_ = -1;
}

} // namespace ccb
