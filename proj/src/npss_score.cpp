#include "actscan/npss_score.hpp"

#include <algorithm>
#include <cmath>

#include "actscan/error.hpp"

namespace actscan {

double priority(const PValueRange& range, double alpha) {
    if (alpha <= range.pmin) return 0.0;
    if (alpha >= range.pmax) return 1.0;
    return std::clamp((alpha - range.pmin) / (range.pmax - range.pmin), 0.0, 1.0);
}

double kl_bernoulli(double x, double y) {
    if (!(y > 0.0 && y < 1.0)) throw Error(ErrorCode::invalid_argument, "KL reference proportion must lie in (0, 1)");
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::invalid_argument, "KL observed proportion must lie in [0, 1]");
    const double head = x == 0.0 ? 0.0 : x * std::log(x / y);
    const double tail = x == 1.0 ? 0.0 : (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
    return head + tail;
}

double berk_jones(const SubsetStats& stats) {
    if (stats.n == 0) throw Error(ErrorCode::invalid_argument, "subset must be nonempty");
    if (!(stats.alpha > 0.0 && stats.alpha <= 1.0))
        throw Error(ErrorCode::invalid_argument, "alpha must lie in (0, 1]");
    const double n = static_cast<double>(stats.n);
    if (!(stats.n_alpha >= 0.0 && stats.n_alpha <= n))
        throw Error(ErrorCode::invalid_argument, "n_alpha must lie in [0, n]");

    const double observed = stats.n_alpha / n;
    if (observed <= stats.alpha) return 0.0;
    return n * kl_bernoulli(observed, stats.alpha);
}

double score(Statistic statistic, const SubsetStats& stats) {
    switch (statistic) {
        case Statistic::berk_jones: return berk_jones(stats);
    }
    throw Error(ErrorCode::invalid_argument, "unknown statistic");
}

}  // namespace actscan
