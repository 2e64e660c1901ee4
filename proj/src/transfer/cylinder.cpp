#include "asiplab/transfer/cylinder.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "asiplab/common/error.hpp"

namespace asiplab::transfer {

CylinderSpace::CylinderSpace(const systems::MarkovShiftModel& model, int depth)
    : model_(model), depth_(depth), n_(model.alphabet_size()) {
    if (depth < 1) throw InputError("cylinder depth must be at least 1");
    total_codes_ = 1;
    for (int i = 0; i < depth; ++i) {
        total_codes_ *= static_cast<std::uint64_t>(n_);
        if (total_codes_ > kMaxCodes)
            throw InputError("cylinder space of depth " + std::to_string(depth) + " exceeds " +
                             std::to_string(kMaxCodes) + " words");
    }
    index_.assign(total_codes_, -1);
    const auto& p = model.transition();
    const auto& pi = model.stationary();
    // Depth-first enumeration in code order keeps admissibility checks local.
    std::vector<int> word(static_cast<std::size_t>(depth));
    std::vector<double> mass(static_cast<std::size_t>(depth));
    std::vector<std::uint64_t> prefix_code(static_cast<std::size_t>(depth));
    auto recurse = [&](auto&& self, int pos) -> void {
        for (int a = 0; a < n_; ++a) {
            double m = 0.0;
            if (pos == 0) {
                m = pi(a);
            } else {
                const double t = p(word[static_cast<std::size_t>(pos) - 1], a);
                if (t <= 0.0) continue;
                m = mass[static_cast<std::size_t>(pos) - 1] * t;
            }
            word[static_cast<std::size_t>(pos)] = a;
            mass[static_cast<std::size_t>(pos)] = m;
            prefix_code[static_cast<std::size_t>(pos)] =
                (pos == 0 ? 0 : prefix_code[static_cast<std::size_t>(pos) - 1] * n_) + static_cast<std::uint64_t>(a);
            if (pos + 1 == depth) {
                index_[prefix_code[static_cast<std::size_t>(pos)]] = static_cast<std::int64_t>(codes_.size());
                codes_.push_back(prefix_code[static_cast<std::size_t>(pos)]);
                measure_.push_back(m);
            } else {
                self(self, pos + 1);
            }
        }
    };
    recurse(recurse, 0);
}

std::int64_t CylinderSpace::index_of(std::span<const int> word) const {
    if (static_cast<int>(word.size()) != depth_) throw InputError("word length does not match cylinder depth");
    std::uint64_t code = 0;
    for (int s : word) {
        if (s < 0 || s >= n_) return -1;
        code = code * n_ + static_cast<std::uint64_t>(s);
    }
    return index_[code];
}

std::vector<int> CylinderSpace::word(std::size_t idx) const {
    std::vector<int> w(static_cast<std::size_t>(depth_));
    std::uint64_t c = codes_[idx];
    for (int i = depth_ - 1; i >= 0; --i) {
        w[static_cast<std::size_t>(i)] = static_cast<int>(c % n_);
        c /= n_;
    }
    return w;
}

int CylinderSpace::symbol(std::size_t idx, int position) const noexcept {
    std::uint64_t c = codes_[idx];
    for (int i = depth_ - 1; i > position; --i) c /= n_;
    return static_cast<int>(c % n_);
}

std::vector<double> CylinderFunction::component(int c) const {
    std::vector<double> out(values.size() / static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(i, c);
    return out;
}

CylinderFunction tabulate(const CylinderSpace& space, int dim, const WordFunction& fn) {
    if (dim < 1) throw InputError("cylinder function dimension must be positive");
    CylinderFunction f;
    f.depth = space.depth();
    f.dim = dim;
    f.values.resize(space.size() * static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < space.size(); ++i) {
        const auto w = space.word(i);
        fn(w, std::span<double>(f.values.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)));
        for (int c = 0; c < dim; ++c)
            if (!std::isfinite(f(i, c))) throw InputError("cylinder function value is not finite");
    }
    return f;
}

std::vector<double> integrate(const CylinderSpace& space, const CylinderFunction& f) {
    std::vector<long double> acc(static_cast<std::size_t>(f.dim), 0.0L);
    const auto& m = space.measure();
    for (std::size_t i = 0; i < space.size(); ++i)
        for (int c = 0; c < f.dim; ++c) acc[static_cast<std::size_t>(c)] += static_cast<long double>(m[i]) * f(i, c);
    return {acc.begin(), acc.end()};
}

CylinderFunction centred(const CylinderSpace& space, const CylinderFunction& f) {
    const auto mean = integrate(space, f);
    CylinderFunction g = f;
    for (std::size_t i = 0; i < space.size(); ++i)
        for (int c = 0; c < f.dim; ++c) g(i, c) -= mean[static_cast<std::size_t>(c)];
    return g;
}

CylinderFunction lift(const CylinderSpace& from, const CylinderFunction& f, const CylinderSpace& to) {
    if (to.depth() < from.depth()) throw InputError("lift needs a deeper target space");
    const int drop = to.depth() - from.depth();
    std::uint64_t divisor = 1;
    for (int i = 0; i < drop; ++i) divisor *= static_cast<std::uint64_t>(to.alphabet());
    CylinderFunction g;
    g.depth = to.depth();
    g.dim = f.dim;
    g.values.resize(to.size() * static_cast<std::size_t>(f.dim));
    for (std::size_t i = 0; i < to.size(); ++i) {
        const auto src = from.index_of_code(to.code(i) / divisor);
        for (int c = 0; c < f.dim; ++c) g(i, c) = f(static_cast<std::size_t>(src), c);
    }
    return g;
}

CylinderFunction condition_on_prefix(const CylinderSpace& fine, const CylinderFunction& f,
                                     const CylinderSpace& coarse) {
    if (coarse.depth() > fine.depth()) throw InputError("conditioning space must be coarser");
    const int drop = fine.depth() - coarse.depth();
    std::uint64_t divisor = 1;
    for (int i = 0; i < drop; ++i) divisor *= static_cast<std::uint64_t>(fine.alphabet());
    std::vector<long double> acc(coarse.size() * static_cast<std::size_t>(f.dim), 0.0L);
    std::vector<long double> mass(coarse.size(), 0.0L);
    const auto& m = fine.measure();
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const auto j = static_cast<std::size_t>(coarse.index_of_code(fine.code(i) / divisor));
        mass[j] += m[i];
        for (int c = 0; c < f.dim; ++c) acc[j * static_cast<std::size_t>(f.dim) + c] += static_cast<long double>(m[i]) * f(i, c);
    }
    CylinderFunction g;
    g.depth = coarse.depth();
    g.dim = f.dim;
    g.values.resize(acc.size());
    for (std::size_t j = 0; j < coarse.size(); ++j)
        for (int c = 0; c < f.dim; ++c) {
            const auto k = j * static_cast<std::size_t>(f.dim) + c;
            g.values[k] = mass[j] > 0 ? static_cast<double>(acc[k] / mass[j]) : 0.0;
        }
    return g;
}

CylinderFunction dyadic_average(const CylinderSpace& space, const std::function<double(double)>& antiderivative) {
    if (space.alphabet() != 2) throw InputError("dyadic averages need the 2-symbol alphabet");
    const double width = std::ldexp(1.0, -space.depth());
    CylinderFunction f;
    f.depth = space.depth();
    f.dim = 1;
    f.values.resize(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double lo = static_cast<double>(space.code(i)) * width;
        f.values[i] = (antiderivative(lo + width) - antiderivative(lo)) / width;
    }
    return f;
}

CylinderFunction dyadic_cos2pi(const CylinderSpace& space) {
    if (space.alphabet() != 2) throw InputError("dyadic averages need the 2-symbol alphabet");
    // (sin 2pi(a+w) - sin 2pi a) / (2 pi w) without the cancellation
    const double width = std::ldexp(1.0, -space.depth());
    const double damp = std::sin(std::numbers::pi * width) / (std::numbers::pi * width);
    CylinderFunction f;
    f.depth = space.depth();
    f.values.resize(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double mid = (static_cast<double>(space.code(i)) + 0.5) * width;
        f.values[i] = std::cos(2.0 * std::numbers::pi * mid) * damp;
    }
    return f;
}

}  // namespace asiplab::transfer
