#pragma once

// Deterministic tree reduction.  The index range is split at midpoints down to
// blocks of kReduceLeaf items, each summed left to right; the tree shape depends
// only on the range length, so serial and threaded runs give identical bits.

#include <cstddef>
#include <future>
#include <thread>
#include <utility>

namespace polyberg {

inline constexpr std::size_t kReduceLeaf = 32;

/// Number of tree levels that fan out to std::async; 0 runs serially.
inline int& reduce_parallel_depth() {
    static int depth = std::thread::hardware_concurrency() > 1 ? 3 : 0;
    return depth;
}

namespace detail {

template <class Leaf, class Combine>
auto tree_reduce(std::size_t begin, std::size_t end, const Leaf& leaf, const Combine& combine, int par)
    -> decltype(leaf(begin, end)) {
    if (end - begin <= kReduceLeaf) return leaf(begin, end);
    const std::size_t mid = begin + (end - begin) / 2;
    if (par > 0) {
        auto right = std::async(std::launch::async,
                                [&] { return tree_reduce(mid, end, leaf, combine, par - 1); });
        auto left = tree_reduce(begin, mid, leaf, combine, par - 1);
        return combine(std::move(left), right.get());
    }
    auto left = tree_reduce(begin, mid, leaf, combine, 0);
    auto right = tree_reduce(mid, end, leaf, combine, 0);
    return combine(std::move(left), std::move(right));
}

} // namespace detail

/// leaf(b, e) accumulates items [b, e) sequentially; combine(l, r) merges partials.
template <class Leaf, class Combine>
auto pairwise_reduce(std::size_t n, const Leaf& leaf, const Combine& combine, int parallel_depth = -1)
    -> decltype(leaf(std::size_t{}, std::size_t{})) {
    const int par = parallel_depth < 0 ? reduce_parallel_depth() : parallel_depth;
    if (n == 0) return leaf(0, 0);
    return detail::tree_reduce(0, n, leaf, combine, par);
}

/// Sum of term(i) for i in [0, n) with the fixed tree order.
template <class T, class Term>
T pairwise_sum(std::size_t n, const Term& term, int parallel_depth = -1) {
    return pairwise_reduce(
        n,
        [&](std::size_t b, std::size_t e) {
            T acc{};
            for (std::size_t i = b; i < e; ++i) acc += term(i);
            return acc;
        },
        [](T l, const T& r) { return l += r; }, parallel_depth);
}

} // namespace polyberg
