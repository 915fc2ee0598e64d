#pragma once

#include "dynq/database.hpp"
#include "dynq/hierarchy.hpp"
#include "dynq/instrument.hpp"
#include "dynq/query.hpp"
#include "dynq/ucq_engine.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dynq {

struct Capabilities
{
    bool count = false;
    bool test = false;
    bool enumerate = false;
    bool answer = false;
};

/** Common surface of the dynamic and the naive engine. Routines outside `capabilities()` throw
 * `unsupported_routine`. */
class QueryEngine
{
  public:
    virtual ~QueryEngine() = default;

    virtual void update(const UpdateCommand &cmd) = 0;
    virtual std::uint64_t count() = 0;
    virtual bool test(const Tuple &t) = 0;
    /// Whether the result is nonempty.
    virtual bool answer() = 0;
    /// Emits answers until exhausted or until `emit` returns false.
    virtual void enumerate(const std::function<bool(const Tuple &)> &emit) = 0;

    virtual Capabilities capabilities() const = 0;
    /// Human-readable engine choice, e.g. "dynamic[count,test,enum]".
    virtual std::string description() const = 0;
    virtual const EngineReport &report() const = 0;
    virtual std::size_t arity() const = 0;

    void load(const Database &db)
    {
        for (const UpdateCommand &cmd : db.as_insertions())
            update(cmd);
    }
    std::vector<Tuple> collect()
    {
        std::vector<Tuple> out;
        enumerate([&](const Tuple &t) {
            out.push_back(t);
            return true;
        });
        return out;
    }
};

/** Composes the engines the query class admits: counting for exhaustively q-hierarchical unions, enumeration and
 * answering for q-hierarchical ones, testing for t-hierarchical ones. Operates on the homomorphic core. */
class DynamicEngine final : public QueryEngine
{
  public:
    DynamicEngine(const UCQ &q, const Schema &schema, std::size_t budget = default_hom_budget);
    DynamicEngine(const UCQ &q, const ClassReport &classes, const Schema &schema,
                  std::size_t budget = default_hom_budget);

    void update(const UpdateCommand &cmd) override;
    std::uint64_t count() override;
    bool test(const Tuple &t) override;
    bool answer() override;
    void enumerate(const std::function<bool(const Tuple &)> &emit) override;

    Capabilities capabilities() const override { return caps_; }
    std::string description() const override;
    const EngineReport &report() const override { return report_; }
    std::size_t arity() const override { return arity_; }

    const ClassReport &classes() const { return classes_; }
    std::uint64_t steps() const;

  private:
    std::size_t arity_ = 0;
    ClassReport classes_;
    Capabilities caps_;
    bool empty_query_ = false;
    std::unique_ptr<UcqTestEngine> tester_;
    std::unique_ptr<UcqEnumEngine> enumer_;
    std::unique_ptr<UcqCountEngine> counter_;
    EngineReport report_;

    [[noreturn]] void unsupported(const std::string &routine) const;
};

enum class EngineKind { automatic, dynamic, naive };

EngineKind parse_engine_kind(const std::string &name);

/** `automatic` picks the dynamic engine when the core is at least t-hierarchical and the naive engine otherwise;
 * `dynamic` always builds the dynamic engine (with whatever routines the class allows). */
std::unique_ptr<QueryEngine> make_engine(const UCQ &q, const Schema &schema, EngineKind kind = EngineKind::automatic,
                                         std::size_t budget = default_hom_budget);

}
