#pragma once

#include "dynq/errors.hpp"
#include "dynq/skip_set.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

namespace dynq {

/** Duplicate-free enumeration of T_1 u ... u T_l over skip structures.
 *
 * Emits T_1 in its own order, then T_2 minus T_1, and so on. After emitting t from T_i, t is excluded from every
 * T_j with j > i: if t_r..t_s is a maximal run of already-emitted elements of T_j, then skip_j[t_r] = t_{s+1} and
 * skipback_j[t_{s+1}] = t_r, with `nullopt` standing for the end. Each call to `next` costs O(l) steps. */
template <class T, class Hash = std::hash<T>>
class UnionEnumerator
{
  public:
    using SkipMap = std::unordered_map<T, std::optional<T>, Hash>;
    using BackMap = std::unordered_map<T, T, Hash>;

    explicit UnionEnumerator(std::vector<const SkipSet<T> *> sets)
        : sets_(std::move(sets)), skip_(sets_.size()), skipback_(sets_.size()), skipback_end_(sets_.size())
    {
        for (const SkipSet<T> *s : sets_)
            versions_.push_back(s->version());
    }

    /// The next element of the union, or `nullopt` once exhausted.
    std::optional<T> next()
    {
        for (std::size_t j = 0; j < sets_.size(); ++j)
            if (sets_[j]->version() != versions_[j])
                throw concurrent_modification("a set changed while its union was being enumerated");
        const std::uint64_t before = steps_;
        std::optional<T> out = advance();
        const std::uint64_t delay = steps_ - before;
        last_delay_ = delay;
        if (delay > max_delay_)
            max_delay_ = delay;
        return out;
    }

    std::uint64_t steps() const { return steps_; }
    std::uint64_t last_delay() const { return last_delay_; }
    std::uint64_t max_delay() const { return max_delay_; }
    std::size_t size() const { return sets_.size(); }

    const SkipMap &skip(std::size_t j) const { return skip_[j]; }
    const BackMap &skipback(std::size_t j) const { return skipback_[j]; }
    /// skipback_j at the end marker.
    const std::optional<T> &skipback_end(std::size_t j) const { return skipback_end_[j]; }

    /// Excludes `t` from T_j. Exposed for inspection; `next` calls it after every emission.
    void exclude(std::size_t j, const T &t)
    {
        ++steps_;
        const SkipSet<T> &set = *sets_[j];
        if (not set.contains(t))
            return;
        T lo = t;
        if (auto it = skipback_[j].find(t); it != skipback_[j].end()) {
            lo = std::move(it->second);
            skipback_[j].erase(it);
        }
        std::optional<T> hi = set.next(t);
        if (hi) {
            if (auto it = skip_[j].find(*hi); it != skip_[j].end()) {
                std::optional<T> jump = std::move(it->second);
                skip_[j].erase(it);
                hi = std::move(jump);
            }
        }
        if (hi)
            skipback_[j].insert_or_assign(*hi, lo);
        else
            skipback_end_[j] = lo;
        skip_[j].insert_or_assign(std::move(lo), std::move(hi));
    }

  private:
    std::vector<const SkipSet<T> *> sets_;
    std::vector<std::uint64_t> versions_;
    std::vector<SkipMap> skip_;
    std::vector<BackMap> skipback_;
    std::vector<std::optional<T>> skipback_end_;
    std::size_t current_ = 0;
    bool entered_ = false;
    std::optional<T> cursor_;
    std::uint64_t steps_ = 0;
    std::uint64_t last_delay_ = 0;
    std::uint64_t max_delay_ = 0;

    std::optional<T> advance()
    {
        while (current_ < sets_.size()) {
            ++steps_;
            if (not entered_) {
                cursor_ = sets_[current_]->start();
                entered_ = true;
            }
            while (cursor_) {
                ++steps_;
                auto it = skip_[current_].find(*cursor_);
                if (it == skip_[current_].end()) {
                    T t = std::move(*cursor_);
                    for (std::size_t j = current_ + 1; j < sets_.size(); ++j)
                        exclude(j, t);
                    cursor_ = sets_[current_]->next(t);
                    return t;
                }
                cursor_ = it->second;
            }
            ++current_;
            entered_ = false;
        }
        return std::nullopt;
    }
};

/// Runs a union enumeration to completion.
template <class T, class Hash = std::hash<T>>
std::vector<T> enumerate_union(const std::vector<const SkipSet<T> *> &sets)
{
    UnionEnumerator<T, Hash> e(sets);
    std::vector<T> out;
    while (auto t = e.next())
        out.push_back(std::move(*t));
    return out;
}

}
