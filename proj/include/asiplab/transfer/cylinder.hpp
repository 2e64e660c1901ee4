#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "asiplab/systems/markov_shift.hpp"

namespace asiplab::transfer {

/// Admissible words of length k over a Markov shift, numbered densely.
/// Word codes are base-n with w_0 the most significant digit.
class CylinderSpace {
public:
    static constexpr std::uint64_t kMaxCodes = std::uint64_t{1} << 24;

    /// Throws InputError for k < 1 or more than kMaxCodes codes.
    CylinderSpace(const systems::MarkovShiftModel& model, int depth);

    const systems::MarkovShiftModel& model() const noexcept { return model_; }
    int depth() const noexcept { return depth_; }
    int alphabet() const noexcept { return n_; }
    std::size_t size() const noexcept { return codes_.size(); }
    /// Dense index of a word code, or -1 when the word is not admissible.
    std::int64_t index_of_code(std::uint64_t code) const noexcept { return index_[code]; }
    std::int64_t index_of(std::span<const int> word) const;
    std::uint64_t code(std::size_t idx) const noexcept { return codes_[idx]; }
    std::vector<int> word(std::size_t idx) const;
    int symbol(std::size_t idx, int position) const noexcept;
    /// m([w]) for each dense index.
    const std::vector<double>& measure() const noexcept { return measure_; }

private:
    systems::MarkovShiftModel model_;
    int depth_;
    int n_;
    std::uint64_t total_codes_;
    std::vector<std::int32_t> index_;
    std::vector<std::uint64_t> codes_;
    std::vector<double> measure_;
};

/// Real d-vector valued function constant on the cylinders of a space;
/// values are stored row-major (index * dim + component).
struct CylinderFunction {
    int depth = 1;
    int dim = 1;
    std::vector<double> values;

    double operator()(std::size_t idx, int c = 0) const { return values[idx * static_cast<std::size_t>(dim) + c]; }
    double& operator()(std::size_t idx, int c = 0) { return values[idx * static_cast<std::size_t>(dim) + c]; }
    std::vector<double> component(int c) const;
};

using WordFunction = std::function<void(std::span<const int> word, std::span<double> out)>;

CylinderFunction tabulate(const CylinderSpace& space, int dim, const WordFunction& fn);

/// Integral against the stationary measure, per component.
std::vector<double> integrate(const CylinderSpace& space, const CylinderFunction& f);

/// Subtract the integral so every component has mean zero.
CylinderFunction centred(const CylinderSpace& space, const CylinderFunction& f);

/// Re-express a depth-k function on a deeper space (depends on the first k symbols only).
CylinderFunction lift(const CylinderSpace& from, const CylinderFunction& f, const CylinderSpace& to);

/// E(f | first k symbols) for f on a finer space; the result lives on `coarse`.
CylinderFunction condition_on_prefix(const CylinderSpace& fine, const CylinderFunction& f,
                                     const CylinderSpace& coarse);

/// Cylinder averages of a function of x in [0, 1) under the binary coding
/// x = sum w_i 2^{-i-1}, computed exactly from an antiderivative.  Requires
/// the full 2-shift.
CylinderFunction dyadic_average(const CylinderSpace& space, const std::function<double(double)>& antiderivative);

/// cos(2 pi x) averaged over dyadic cylinders.
CylinderFunction dyadic_cos2pi(const CylinderSpace& space);

}  // namespace asiplab::transfer
