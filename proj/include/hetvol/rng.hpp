#ifndef HETVOL_RNG_HPP
#define HETVOL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace hetvol {

// mt19937_64 with hand-rolled uniform/normal mappings so that streams are
// reproducible across standard libraries (std distributions are
// implementation-defined).
class Rng64 {
public:
    explicit Rng64(std::uint64_t seed) : eng_(seed) {}
    Rng64(std::uint64_t seed, std::uint64_t stream)
        : eng_(splitmix(seed ^ splitmix(stream + 0x9e3779b97f4a7c15ULL))) {}

    // uniform on [0,1)
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    // standard normal via Box-Muller, one spare cached
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    std::uint64_t raw() { return eng_(); }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace hetvol

#endif
