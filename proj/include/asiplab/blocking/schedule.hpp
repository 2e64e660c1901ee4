#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace asiplab::blocking {

/// floor(j^e) computed exactly.  Exponents that are rationals p/q with
/// q <= 64 are resolved by integer comparison r^q <= j^p; other exponents use
/// extended precision.  Throws InputError when the result exceeds 2^62.
std::uint64_t floor_pow(std::uint64_t j, double e);

/// Alternating long/short blocks: block j holds [j^Q] long-block terms
/// followed by [j^alpha] short-block terms and conditions at depth
/// [j^alpha / 2].  Blocks are numbered from 1; P_0 = 0.
class BlockSchedule {
public:
    /// Blocks until P_M >= n_max (the last block may be partially used).
    /// Throws InputError unless Q > alpha > 0 and n_max >= 1.
    static BlockSchedule build(double Q, double alpha, std::uint64_t n_max);

    double Q() const noexcept { return Q_; }
    double alpha() const noexcept { return alpha_; }
    std::uint64_t n_max() const noexcept { return n_max_; }
    std::size_t blocks() const noexcept { return long_.size(); }

    std::uint64_t long_size(std::size_t j) const { return long_.at(j - 1); }
    std::uint64_t short_size(std::size_t j) const { return short_.at(j - 1); }
    int cond_depth(std::size_t j) const { return depth_.at(j - 1); }
    /// P_j; boundary(0) = 0.
    std::uint64_t boundary(std::size_t j) const { return j == 0 ? 0 : boundary_.at(j - 1); }
    /// Last index of the long part of block j.
    std::uint64_t long_end(std::size_t j) const { return boundary(j - 1) + long_size(j); }

    /// M_N: the block with P_{M-1} < N <= P_M.  Throws InputError for N = 0 or N > P_last.
    std::size_t block_of(std::uint64_t N) const;
    /// Conditioning depth used at time index n (1-based).
    int depth_at(std::uint64_t n) const { return cond_depth(block_of(n)); }

    /// CSV with columns j,long,short,ell,P_j.
    void export_csv(const std::filesystem::path& path) const;

private:
    double Q_ = 0.0;
    double alpha_ = 0.0;
    std::uint64_t n_max_ = 0;
    std::vector<std::uint64_t> long_;
    std::vector<std::uint64_t> short_;
    std::vector<int> depth_;
    std::vector<std::uint64_t> boundary_;
};

/// The same schedule continued until it holds at least `blocks` blocks.
BlockSchedule extend_schedule(const BlockSchedule& schedule, std::size_t blocks);

/// Q = 4d + 6.5, alpha = 0.1.
BlockSchedule theorem_schedule(int d, std::uint64_t n_max);
/// Q = 2, alpha = 0.5.
BlockSchedule diagnostic_schedule(std::uint64_t n_max);

}  // namespace asiplab::blocking
