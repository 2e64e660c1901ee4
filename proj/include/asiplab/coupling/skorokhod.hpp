#pragma once

#include <cstddef>
#include <vector>

#include "asiplab/common/random.hpp"
#include "asiplab/coupling/brownian.hpp"

namespace asiplab::coupling {

/// Finite discrete law with distinct atoms.
struct DiscreteLaw {
    std::vector<double> atoms;
    std::vector<double> probs;

    double mean() const;
    double second_moment() const;
    /// Throws InputError for mismatched sizes, negative or non-normalised
    /// probabilities, or a mean further than `mean_tolerance` from zero.
    void validate(double mean_tolerance = 1e-12) const;
};

/// Merge atoms closer than `tolerance` (relative to the largest |atom|),
/// adding their probabilities; zero-probability atoms are dropped.
DiscreteLaw merge_atoms(std::vector<double> atoms, std::vector<double> probs, double tolerance = 1e-13);

struct Embedding {
    double value = 0.0;     ///< W(tau) - W(start), one of the atoms
    double time = 0.0;      ///< tau - start
    std::size_t atom = 0;   ///< index into law.atoms
};

/// Randomised two-point embedding: pick a pair u < 0 < v with probability
/// proportional to (v - u) mu(u) mu(v), then run W to the exit of (u, v).
/// A zero atom is chosen with its own probability and costs no time.
Embedding skorokhod_embed(const DiscreteLaw& law, BrownianPath& path, Rng& rng);

/// Pearson chi-square p-value of observed atom counts against the law.
double chi_square_pvalue(const DiscreteLaw& law, const std::vector<std::size_t>& counts);

}  // namespace asiplab::coupling
