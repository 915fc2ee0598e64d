#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace dynq {

/** A set with constant-time membership and a fixed internal order that can be entered at any member.
 *
 * `start` yields the first element; `next(t)` the successor of member `t`; `nullopt` marks the end. `version`
 * changes whenever the represented set changes. */
template <class T>
class SkipSet
{
  public:
    virtual ~SkipSet() = default;

    virtual bool contains(const T &t) const = 0;
    virtual std::optional<T> start() const = 0;
    virtual std::optional<T> next(const T &t) const = 0;
    virtual std::uint64_t version() const = 0;
};

/// A SkipSet over an explicit sequence; order is the given order.
template <class T, class Hash = std::hash<T>>
class ListSkipSet final : public SkipSet<T>
{
  public:
    explicit ListSkipSet(std::vector<T> items) : items_(std::move(items))
    {
        for (std::size_t i = 0; i < items_.size(); ++i)
            index_.emplace(items_[i], i);
    }

    bool contains(const T &t) const override { return index_.contains(t); }

    std::optional<T> start() const override
    {
        if (items_.empty())
            return std::nullopt;
        return items_.front();
    }

    std::optional<T> next(const T &t) const override
    {
        const std::size_t i = index_.at(t) + 1;
        if (i == items_.size())
            return std::nullopt;
        return items_[i];
    }

    std::uint64_t version() const override { return version_; }

    const std::vector<T> &items() const { return items_; }
    /// Marks the set as changed without altering it.
    void touch() { ++version_; }

  private:
    std::vector<T> items_;
    std::unordered_map<T, std::size_t, Hash> index_;
    std::uint64_t version_ = 0;
};

}
