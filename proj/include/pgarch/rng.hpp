#pragma once

#include <cstdint>
#include <random>

#include "pgarch/model.hpp"

namespace pgarch {

/// splitmix64 step; used to derive well-separated sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic sub-seed from a root seed and up to three stream labels.
/// Results do not depend on worker scheduling, only on the labels.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0) {
    std::uint64_t s = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    s = splitmix64(s ^ a);
    s = splitmix64(s ^ b);
    s = splitmix64(s ^ c);
    return s;
}

/// Draws i.i.d. innovations with mean 0 and variance 1.
class InnovationSampler {
  public:
    InnovationSampler(const InnovationDist& dist, std::uint64_t seed)
        : dist_(dist), gen_(seed), student_(dist.kind == DistKind::StudentT ? dist.dof : 3.0) {
        if (dist.kind == DistKind::StudentT)
            t_scale_ = std::sqrt((dist.dof - 2.0) / dist.dof);
    }

    double draw() {
        switch (dist_.kind) {
            case DistKind::Gaussian: return normal_(gen_);
            case DistKind::StudentT: return t_scale_ * student_(gen_);
            case DistKind::UnitConstant: return (gen_() & 1ULL) ? 1.0 : -1.0;
        }
        return 0.0;
    }

    double draw_sq() {
        const double e = draw();
        return e * e;
    }

    const InnovationDist& dist() const { return dist_; }

  private:
    InnovationDist dist_;
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::student_t_distribution<double> student_;
    double t_scale_ = 1.0;
};

} // namespace pgarch
