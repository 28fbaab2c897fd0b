#ifndef PBINFER_RNG_HPP
#define PBINFER_RNG_HPP

#include <cmath>
#include <cstdint>

namespace pbinfer {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace detail

// Counter-based splittable generator. The output stream is a pure function
// of (seed, replicate, stream, call index), so parallel replicates draw
// identical values regardless of scheduling or thread count.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed, std::uint64_t replicate = 0, std::uint64_t stream = 0) {
        key_ = detail::mix64(seed + 0x9e3779b97f4a7c15ULL);
        key_ = detail::mix64(key_ ^ (replicate * 0xbf58476d1ce4e5b9ULL + 0x2545f4914f6cdd1dULL));
        key_ = detail::mix64(key_ ^ (stream * 0x94d049bb133111ebULL + 0xda942042e4dd58b5ULL));
    }

    std::uint64_t next_u64() {
        ctr_ += 0x9e3779b97f4a7c15ULL;
        return detail::mix64(key_ ^ ctr_);
    }

    /// Uniform on the open interval (0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    /// Standard normal via Box-Muller; the paired draw is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = uniform01();
        double v = uniform01();
        double r = std::sqrt(-2.0 * std::log(u));
        double t = 6.283185307179586476925287 * v;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace pbinfer

#endif
