#include <algorithm>
#include <limits>
#include <map>

#include "starris/errors.hpp"
#include "starris/harness.hpp"

namespace starris {

namespace {

struct SpaceBest {
    double value = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> levels;  // grid level per element, 0 where the space owns nothing
};

// Exhaustive phase search for one space given which of its users owns each element
// (-1: not owned by this space).
class SpaceSearch {
public:
    SpaceSearch(const ChannelSet& ch, const std::vector<ComplexMatrix>& g, const std::vector<ComplexMatrix>& h,
                const LinkBudget& budget, std::size_t grid)
        : h_(h), budget_(budget), grid_(grid), n_(ch.elements()), m_(ch.antennas()) {
        // contrib_[u][e][q] = g_u[e] exp(j 2 pi q / grid) G[e, :]
        contrib_.resize(g.size());
        for (std::size_t u = 0; u < g.size(); ++u) {
            contrib_[u].resize(n_);
            for (std::size_t e = 0; e < n_; ++e) {
                for (std::size_t q = 0; q < grid; ++q) {
                    const cplx phasor = std::polar(1.0, 2.0 * kPi * static_cast<double>(q) / static_cast<double>(grid));
                    ComplexMatrix row(1, m_);
                    for (std::size_t a = 0; a < m_; ++a) row[a] = g[u][e] * phasor * ch.G(e, a);
                    contrib_[u][e].push_back(std::move(row));
                }
            }
        }
    }

    const SpaceBest& best(const std::vector<int>& owners) {
        auto it = memo_.find(owners);
        if (it != memo_.end()) return it->second;
        return memo_.emplace(owners, search(owners)).first->second;
    }

private:
    SpaceBest search(const std::vector<int>& owners) const {
        std::vector<std::size_t> active;
        for (std::size_t e = 0; e < n_; ++e)
            if (owners[e] >= 0) active.push_back(e);
        const std::size_t users = h_.size();
        std::vector<std::size_t> levels(n_, 0);
        std::vector<ComplexMatrix> cascaded(users, ComplexMatrix(1, m_));
        SpaceBest best;
        while (true) {
            for (auto& c : cascaded) c = ComplexMatrix(1, m_);
            for (std::size_t e : active) cascaded[static_cast<std::size_t>(owners[e])] += contrib_[owners[e]][e][levels[e]];
            double value = 0.0;
            try {
                for (std::size_t j = 0; j < users; ++j) {
                    const ComplexMatrix w = mrt_from_cascaded(cascaded[j], h_[j]);
                    value += sinr_from_cascaded(j, cascaded, h_[j], w, budget_);
                }
            } catch (const DegenerateBeamformerError&) {
                value = -std::numeric_limits<double>::infinity();
            }
            if (value > best.value) {
                best.value = value;
                best.levels = levels;
            }
            std::size_t i = 0;
            for (; i < active.size(); ++i) {
                if (++levels[active[i]] < grid_) break;
                levels[active[i]] = 0;
            }
            if (i == active.size()) break;
        }
        return best;
    }

    const std::vector<ComplexMatrix>& h_;
    const LinkBudget& budget_;
    std::size_t grid_;
    std::size_t n_;
    std::size_t m_;
    std::vector<std::vector<std::vector<ComplexMatrix>>> contrib_;
    std::map<std::vector<int>, SpaceBest> memo_;
};

}  // namespace

double total_sinr(const RateReport& report) {
    double s = 0.0;
    for (double x : report.sinr_r) s += x;
    for (double x : report.sinr_t) s += x;
    return s;
}

OracleResult brute_force_best_assignment(const ChannelSet& channels, std::size_t k, std::size_t l,
                                         const LinkBudget& budget, std::size_t grid) {
    const std::size_t n = channels.elements();
    const std::size_t users = k + l;
    if (n > kOracleMaxElements) throw SizeError("oracle: at most 6 elements, got " + std::to_string(n));
    if (users > kOracleMaxUsers) throw SizeError("oracle: at most 3 users, got " + std::to_string(users));
    if (grid == 0 || grid > kOracleMaxGrid) throw SizeError("oracle: grid must lie in 1..8");
    if (users == 0 || users > n) throw DomainError("oracle: need 1 <= K + L <= N");
    if (channels.g_r.size() != k || channels.g_t.size() != l) throw ShapeError("oracle: channel set mismatch");

    SpaceSearch refl(channels, channels.g_r, channels.h_r, budget, grid);
    SpaceSearch trans(channels, channels.g_t, channels.h_t, budget, grid);

    // Odometer over owners in {-1, 0, ..., users-1} per element.
    std::vector<int> owner(n, -1);
    std::vector<int> best_owner;
    std::vector<std::size_t> best_levels;
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<int> r_proj(n), t_proj(n);
    std::vector<std::size_t> count(users);
    while (true) {
        std::fill(count.begin(), count.end(), 0);
        for (int o : owner)
            if (o >= 0) ++count[static_cast<std::size_t>(o)];
        const bool covered = std::all_of(count.begin(), count.end(), [](std::size_t c) { return c > 0; });
        if (covered) {
            for (std::size_t e = 0; e < n; ++e) {
                const int o = owner[e];
                r_proj[e] = (o >= 0 && static_cast<std::size_t>(o) < k) ? o : -1;
                t_proj[e] = (o >= 0 && static_cast<std::size_t>(o) >= k) ? o - static_cast<int>(k) : -1;
            }
            const SpaceBest& br = refl.best(r_proj);
            const SpaceBest& bt = trans.best(t_proj);
            const double v = br.value + bt.value;
            if (v > best_value) {
                best_value = v;
                best_owner = owner;
                best_levels.assign(n, 0);
                for (std::size_t e = 0; e < n; ++e) {
                    if (r_proj[e] >= 0) best_levels[e] = br.levels[e];
                    if (t_proj[e] >= 0) best_levels[e] = bt.levels[e];
                }
            }
        }
        std::size_t i = 0;
        for (; i < n; ++i) {
            if (++owner[i] < static_cast<int>(users)) break;
            owner[i] = -1;
        }
        if (i == n) break;
    }
    if (best_owner.empty()) throw DomainError("oracle: no configuration with a usable beamformer");

    OracleResult res;
    res.assignment = AssignmentMatrix(k, l, n);
    res.phases.theta.assign(n, 0.0);
    for (std::size_t e = 0; e < n; ++e) {
        res.assignment.assign(e, best_owner[e]);
        res.phases.theta[e] = 2.0 * kPi * static_cast<double>(best_levels[e]) / static_cast<double>(grid);
    }
    res.total_sinr = best_value;
    return res;
}

}  // namespace starris
