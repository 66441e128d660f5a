#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mmqi/errors.hpp"

namespace mmqi {

/// Default cap on the dimension of any enumerated sector.
inline constexpr std::size_t kDefaultDimCap = 200000;
/// Largest dimension for which operators/states may be materialized dense.
inline constexpr std::size_t kDenseCap = 4096;

enum class Arm { A, B };

/// One of the 2M modes: arm a or b, internal index n < M.
/// Flat layout: a-modes occupy [0, M), b-modes [M, 2M).
struct ModeId {
    Arm arm;
    int index;

    int flat(int modes_per_arm) const {
        return index + (arm == Arm::B ? modes_per_arm : 0);
    }
};

using Occupation = std::vector<int>;

namespace detail {

/// C(n, k) in exact integer arithmetic; intermediate values stay within
/// valid binomials so the multiplicative form cannot overflow for the
/// sector sizes this library admits.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

}  // namespace detail

/// The N-particle sector of 2M bosonic modes, enumerated once and indexed
/// by a combinatorial number system.
///
/// Ordering is strict lexicographic *descending* on occupation vectors, so
/// the first state has all particles in flat mode 0 and ranking is a pure
/// binomial computation (no search).
class FockBasis {
public:
    static std::shared_ptr<const FockBasis> enumerate(int n_particles, int modes_per_arm,
                                                      std::size_t dim_cap = kDefaultDimCap) {
        if (modes_per_arm < 1)
            throw InvalidArgs("enumerate_basis: modes per arm must be >= 1");
        if (n_particles < 0)
            throw InvalidArgs("enumerate_basis: particle number must be >= 0");
        return std::shared_ptr<const FockBasis>(new FockBasis(n_particles, modes_per_arm, dim_cap));
    }

    int particles() const { return n_particles_; }
    int modes_per_arm() const { return modes_per_arm_; }
    int total_modes() const { return 2 * modes_per_arm_; }
    std::size_t dim() const { return states_.size(); }

    const Occupation& state(std::size_t i) const { return states_[i]; }

    /// Rank of an occupation vector under the descending-lex ordering:
    /// the number of admissible vectors strictly greater than `occ`.
    std::size_t rank(const Occupation& occ) const {
        if (occ.size() != static_cast<std::size_t>(total_modes()))
            throw NotInBasis("rank: occupation vector has wrong number of modes");
        int total = 0;
        for (int n : occ) {
            if (n < 0) throw NotInBasis("rank: negative occupation");
            total += n;
        }
        if (total != n_particles_)
            throw NotInBasis("rank: occupation sums to " + std::to_string(total) +
                             ", sector holds " + std::to_string(n_particles_));

        const int modes = total_modes();
        std::size_t r = 0;
        int remaining = n_particles_;
        for (int pos = 0; pos < modes - 1; ++pos) {
            // Vectors sharing the prefix but with a larger entry here come first.
            const int tail = modes - pos - 1;
            if (occ[pos] < remaining) {
                r += detail::binomial(static_cast<std::uint64_t>(remaining - occ[pos] - 1 + tail),
                                      static_cast<std::uint64_t>(tail));
            }
            remaining -= occ[pos];
        }
        return r;
    }

    /// Total-number expectation bookkeeping: arm totals of one vector.
    int arm_total(std::size_t i, Arm arm) const {
        const auto& occ = states_[i];
        const int off = arm == Arm::A ? 0 : modes_per_arm_;
        int s = 0;
        for (int n = 0; n < modes_per_arm_; ++n) s += occ[off + n];
        return s;
    }

private:
    FockBasis(int n_particles, int modes_per_arm, std::size_t dim_cap)
        : n_particles_(n_particles), modes_per_arm_(modes_per_arm) {
        const int modes = 2 * modes_per_arm;
        // dim = C(N + 2M - 1, 2M - 1); bail out as soon as the running
        // binomial exceeds the cap so the product cannot overflow.
        std::uint64_t dim = 1;
        const std::uint64_t n = static_cast<std::uint64_t>(n_particles) + modes - 1;
        const std::uint64_t k = modes - 1;
        for (std::uint64_t i = 1; i <= k; ++i) {
            const std::uint64_t factor = n - k + i;
            if (dim > UINT64_MAX / factor)  // overflow implies far past any cap
                throw DimensionCap("enumerate_basis: sector dimension exceeds cap of " +
                                   std::to_string(dim_cap));
            dim = dim * factor / i;
            if (dim > dim_cap)
                throw DimensionCap("enumerate_basis: sector dimension exceeds cap of " +
                                   std::to_string(dim_cap));
        }

        states_.reserve(dim);
        Occupation occ(modes, 0);
        occ[0] = n_particles;
        states_.push_back(occ);
        // Descending-lex successor: decrement the last nonzero entry among
        // the first 2M-1 positions, move everything to its right back up.
        while (true) {
            int j = -1;
            for (int pos = modes - 2; pos >= 0; --pos) {
                if (occ[pos] > 0) {
                    j = pos;
                    break;
                }
            }
            if (j < 0) break;
            int tail = 0;
            for (int pos = j + 1; pos < modes; ++pos) {
                tail += occ[pos];
                occ[pos] = 0;
            }
            occ[j] -= 1;
            occ[j + 1] = tail + 1;
            states_.push_back(occ);
        }
    }

    int n_particles_;
    int modes_per_arm_;
    std::vector<Occupation> states_;
};

}  // namespace mmqi
