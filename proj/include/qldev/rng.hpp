#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qldev/errors.hpp"

namespace qldev {

// Counter-based splittable streams.  Every Monte-Carlo trial derives its own
// generator from (seed, eps index, n index, trial index), so results are
// independent of how trials are scheduled across workers.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t stream) : state_(splitmix64(stream)) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

inline Rng trial_rng(std::uint64_t seed, std::uint64_t eps_idx, std::uint64_t n_idx,
                     std::uint64_t trial) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (0x100000001b3ULL * (eps_idx + 1)));
    h = splitmix64(h ^ (0x100000001b3ULL * (n_idx + 1)));
    h = splitmix64(h ^ (0x100000001b3ULL * (trial + 1)));
    return Rng(h);
}

// Walker/Vose alias sampler for a fixed finite distribution; O(1) per draw.
class AliasSampler {
  public:
    explicit AliasSampler(const std::vector<double>& weights) {
        std::size_t n = weights.size();
        if (n == 0) throw validation_error("alias sampler: empty distribution");
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0 || !std::isfinite(w)) throw validation_error("alias sampler: bad weight");
            total += w;
        }
        if (total <= 0.0) throw validation_error("alias sampler: zero mass");
        prob_.assign(n, 0.0);
        alias_.assign(n, 0);
        std::vector<double> scaled(n);
        std::vector<std::size_t> small, large;
        for (std::size_t i = 0; i < n; ++i) {
            scaled[i] = weights[i] * static_cast<double>(n) / total;
            (scaled[i] < 1.0 ? small : large).push_back(i);
        }
        while (!small.empty() && !large.empty()) {
            std::size_t s = small.back(), l = large.back();
            small.pop_back();
            large.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            (scaled[l] < 1.0 ? small : large).push_back(l);
        }
        for (std::size_t i : large) prob_[i] = 1.0;
        for (std::size_t i : small) prob_[i] = 1.0;
    }

    std::size_t draw(Rng& rng) const {
        std::size_t n = prob_.size();
        std::size_t i = static_cast<std::size_t>(rng.next() % n);
        return rng.uniform() < prob_[i] ? i : alias_[i];
    }

  private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

}  // namespace qldev
