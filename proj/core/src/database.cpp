#include "dynq/database.hpp"

#include "dynq/errors.hpp"

#include <algorithm>

namespace dynq {

Database::Database(Schema schema) : schema_(std::move(schema)), relations_(schema_.size()) { }

bool Database::apply(const UpdateCommand &cmd)
{
    if (cmd.relation >= relations_.size())
        throw schema_error("update refers to unknown relation id " + std::to_string(cmd.relation));
    if (cmd.tuple.size() != schema_[cmd.relation].arity)
        throw schema_error("relation '" + schema_[cmd.relation].name + "' has arity " +
                           std::to_string(schema_[cmd.relation].arity));
    TupleSet &rel = relations_[cmd.relation];
    if (cmd.kind == UpdateKind::insert) {
        if (not rel.insert(cmd.tuple).second)
            return false;
        ++cardinality_;
        for (Value v : cmd.tuple)
            ++adom_[v];
    } else {
        if (rel.erase(cmd.tuple) == 0)
            return false;
        --cardinality_;
        for (Value v : cmd.tuple)
            if (auto it = adom_.find(v); --it->second == 0)
                adom_.erase(it);
    }
    return true;
}

std::size_t Database::size() const
{
    std::size_t s = schema_.size() + adom_.size();
    for (RelId r = 0; r < relations_.size(); ++r)
        s += schema_[r].arity + schema_[r].arity * relations_[r].size();
    return s;
}

std::vector<Value> Database::active_domain() const
{
    std::vector<Value> out;
    out.reserve(adom_.size());
    for (const auto &[v, n] : adom_)
        out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<UpdateCommand> Database::as_insertions() const
{
    std::vector<UpdateCommand> out;
    out.reserve(cardinality_);
    for (RelId r = 0; r < relations_.size(); ++r) {
        std::vector<Tuple> sorted(relations_[r].begin(), relations_[r].end());
        std::sort(sorted.begin(), sorted.end());
        for (Tuple &t : sorted)
            out.push_back(UpdateCommand{UpdateKind::insert, r, std::move(t)});
    }
    return out;
}

}
