#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace dynq {

/// Fixed-capacity bitset over atom positions.
class AtomSet
{
  public:
    AtomSet() = default;
    explicit AtomSet(std::size_t capacity) : words_((capacity + 63) / 64, 0) { }

    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }

    bool empty() const
    {
        for (auto w : words_)
            if (w)
                return false;
        return true;
    }

    std::size_t count() const
    {
        std::size_t n = 0;
        for (auto w : words_)
            n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    bool subset_of(const AtomSet &o) const
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i])
                return false;
        return true;
    }

    bool disjoint(const AtomSet &o) const
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i])
                return false;
        return true;
    }

    /// Lowest position in `*this` but not in `o`, or `npos`.
    std::size_t first_not_in(const AtomSet &o) const
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (auto w = words_[i] & ~o.words_[i])
                return i * 64 + static_cast<std::size_t>(std::countr_zero(w));
        return npos;
    }

    std::size_t first_common(const AtomSet &o) const
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (auto w = words_[i] & o.words_[i])
                return i * 64 + static_cast<std::size_t>(std::countr_zero(w));
        return npos;
    }

    bool operator==(const AtomSet &) const = default;

    static constexpr std::size_t npos = ~std::size_t{0};

  private:
    std::vector<std::uint64_t> words_;
};

}
