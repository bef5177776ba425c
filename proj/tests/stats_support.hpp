#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace coea::test {

struct ChiSquareResult {
    double statistic = 0.0;
    double critical = 0.0;
    std::size_t dof = 0;

    [[nodiscard]] bool accepted() const { return statistic <= critical; }
};

// Pearson goodness of fit of integer observations against an expected pmf.
// Cells are pooled left to right until each holds at least 5 expected counts.
template <class Pmf>
ChiSquareResult chi_square_fit(const std::map<std::int64_t, std::uint64_t>& observed, std::int64_t lo, std::int64_t hi,
                               Pmf&& pmf, std::uint64_t total, double alpha) {
    std::vector<double> exp_cells, obs_cells;
    double e = 0.0, o = 0.0;
    for (std::int64_t k = lo; k <= hi; ++k) {
        e += pmf(k) * static_cast<double>(total);
        if (auto it = observed.find(k); it != observed.end()) o += static_cast<double>(it->second);
        if (e >= 5.0) {
            exp_cells.push_back(e);
            obs_cells.push_back(o);
            e = o = 0.0;
        }
    }
    for (const auto& [k, c] : observed)
        if (k < lo || k > hi) o += static_cast<double>(c);
    if (!exp_cells.empty()) {
        exp_cells.back() += e;
        obs_cells.back() += o;
    }
    ChiSquareResult r;
    for (std::size_t i = 0; i < exp_cells.size(); ++i) {
        const double d = obs_cells[i] - exp_cells[i];
        r.statistic += d * d / exp_cells[i];
    }
    r.dof = exp_cells.size() > 1 ? exp_cells.size() - 1 : 1;
    r.critical = boost::math::quantile(boost::math::chi_squared(static_cast<double>(r.dof)), 1.0 - alpha);
    return r;
}

}  // namespace coea::test
