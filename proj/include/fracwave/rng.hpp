#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace fracwave {

/// Standard normal draws from mt19937_64 via the Box-Muller
/// transform on 53-bit uniforms. The sequence is fully specified, so it is
/// reproducible across standard libraries.
class NormalRng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64+box-muller-53bit";

    explicit NormalRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

}  // namespace fracwave
