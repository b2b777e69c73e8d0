#include "coalcert/partition.hpp"

#include "coalcert/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <queue>
#include <unordered_map>

namespace coalcert {

refinement_mode resolve_mode(const functor_kind& kind, mode_request request)
{
    switch (request) {
    case mode_request::automatic:
        return kind.cancellative() ? refinement_mode::cancellative : refinement_mode::general;
    case mode_request::general:
        return refinement_mode::general;
    case mode_request::cancellative:
        if (!kind.cancellative())
            throw mode_error("functor kind " + kind.name() + " is not cancellative");
        return refinement_mode::cancellative;
    }
    return refinement_mode::general;
}

const char* mode_name(refinement_mode mode)
{
    return mode == refinement_mode::general ? "general" : "cancellative";
}

std::uint32_t refinement_stats::max_splitter_occurrences() const
{
    std::uint32_t best = 0;
    for (auto k : splitter_occurrences)
        best = std::max(best, k);
    return best;
}

std::vector<std::vector<state_id>> blocks_of(const std::vector<block_id>& block_of)
{
    std::vector<std::vector<state_id>> out;
    std::unordered_map<block_id, std::size_t> slot;
    for (state_id x = 0; x < block_of.size(); ++x) {
        auto [it, fresh] = slot.try_emplace(block_of[x], out.size());
        if (fresh)
            out.emplace_back();
        out[it->second].push_back(x);
    }
    return out;
}

std::vector<std::vector<state_id>> refinement_result::blocks() const { return blocks_of(block_of); }

namespace {

constexpr std::size_t small_groups = 8;

// How F chi(c(x)) is obtained for a touched state.
enum class strategy
{
    // Powerset and boolean monoid: successor counts per compound.
    counting,
    // Cancellative monoids, Dist, Lmc: weight sums per compound and label.
    summing,
    // Dfa and Signature: recompute from the (bounded) successor list.
    direct,
};

class refiner
{
public:
    refiner(const coalgebra& c, refinement_mode mode)
        : c_(c), kind_(c.kind()), mode_(mode), n_(c.size()), rev_(build_reverse_edges(c))
    {
        if (mode == refinement_mode::cancellative && !kind_.cancellative())
            throw mode_error("functor kind " + kind_.name() + " is not cancellative");
        if (kind_.is<powerset_functor>() ||
            (kind_.is<monoid_functor>() && kind_.as<monoid_functor>().monoid == monoid_kind::bool_or))
            strategy_ = strategy::counting;
        else if (kind_.weight_monoid())
            strategy_ = strategy::summing;
        else
            strategy_ = strategy::direct;
        labels_ = kind_.is<lmc_functor>() ? kind_.alphabet().size() : 1;
        if (kind_.weight_monoid())
            zero_ = weight::zero(*kind_.weight_monoid());
        result_.trace.mode = mode;
        result_.trace.state_count = n_;
        result_.stats.splitter_occurrences.assign(n_, 0);
        slot_of_.assign(n_, -1);
    }

    refinement_result run()
    {
        initialize();
        std::size_t iteration = 0;
        while (!queue_.empty()) {
            compound_id b = queue_.front();
            queue_.pop_front();
            compounds_[b].queued = false;
            if (compounds_[b].count < 2)
                continue;
            block_id s = pop_smallest(b);
            compound_id k = new_compound();
            compound_of_block_[s] = k;
            compounds_[k].count = 1;
            compounds_[k].heap.push({size(s), s});
            compounds_[b].count -= 1;
            if (compounds_[b].count >= 2)
                enqueue(b);

            split_event event;
            event.iteration = ++iteration;
            event.splitter = s;
            event.splitter_size = size(s);
            event.compound = b;
            event.splitter_compound = k;
            for (auto pos = blocks_[s].begin; pos < blocks_[s].end; ++pos)
                ++result_.stats.splitter_occurrences[elements_[pos]];
            refine(s, b, k, event);
            result_.trace.events.push_back(std::move(event));
        }
        result_.stats.iterations = iteration;
        result_.block_of = block_of_;
        result_.block_count = blocks_.size();
        return std::move(result_);
    }

private:
    struct block_range
    {
        std::uint32_t begin;
        std::uint32_t end;
    };

    using heap_entry = std::pair<std::uint32_t, block_id>;

    struct compound
    {
        std::uint32_t count = 0;
        bool queued = false;
        std::priority_queue<heap_entry, std::vector<heap_entry>, std::greater<>> heap;
    };

    [[nodiscard]] std::uint32_t size(block_id b) const { return blocks_[b].end - blocks_[b].begin; }

    compound_id new_compound()
    {
        compounds_.emplace_back();
        return static_cast<compound_id>(compounds_.size() - 1);
    }

    void enqueue(compound_id k)
    {
        if (compounds_[k].queued)
            return;
        compounds_[k].queued = true;
        queue_.push_back(k);
    }

    block_id pop_smallest(compound_id b)
    {
        auto& heap = compounds_[b].heap;
        while (!heap.empty()) {
            auto [sz, blk] = heap.top();
            heap.pop();
            if (compound_of_block_[blk] == b && size(blk) == sz)
                return blk;
        }
        throw std::logic_error("compound without blocks");
    }

    void initialize()
    {
        auto& trace = result_.trace;
        std::unordered_map<key, block_id, key_hash> index;
        block_of_.assign(n_, 0);
        for (state_id x = 0; x < n_; ++x) {
            auto k = eval1(c_, x);
            auto [it, fresh] = index.try_emplace(k, static_cast<block_id>(trace.init.size()));
            if (fresh)
                trace.init.push_back({std::move(k), it->second});
            block_of_[x] = it->second;
        }
        trace.initial_block_of = block_of_;

        const auto block_count = trace.init.size();
        std::vector<std::uint32_t> start(block_count + 1, 0);
        for (auto b : block_of_)
            ++start[b + 1];
        for (std::size_t b = 0; b < block_count; ++b)
            start[b + 1] += start[b];
        blocks_.resize(block_count);
        for (std::size_t b = 0; b < block_count; ++b)
            blocks_[b] = {start[b], start[b + 1]};
        elements_.resize(n_);
        location_.resize(n_);
        for (state_id x = 0; x < n_; ++x) {
            location_[x] = start[block_of_[x]]++;
            elements_[location_[x]] = x;
        }

        if (block_count == 0)
            return;
        compound_id all = new_compound();
        compound_of_block_.assign(block_count, all);
        compounds_[all].count = static_cast<std::uint32_t>(block_count);
        for (block_id b = 0; b < block_count; ++b)
            compounds_[all].heap.push({size(b), b});
        if (block_count >= 2)
            enqueue(all);

        // Record x of every edge x -> y initially refers to (x, whole state space).
        if (strategy_ == strategy::summing)
            totals_.assign(n_ * labels_, zero_);
        if (strategy_ == strategy::counting)
            outdeg_.assign(n_, 0);
        for (state_id x = 0; x < n_; ++x)
            for (auto e = c_.edge_begin(x); e < c_.edge_end(x); ++e) {
                if (strategy_ == strategy::counting)
                    ++outdeg_[x];
                else if (strategy_ == strategy::summing)
                    totals_[x * labels_ + c_.slot(e)] += c_.edge_weight(e);
            }
        if (mode_ == refinement_mode::general && strategy_ != strategy::direct) {
            record_of_edge_.resize(c_.edge_count());
            for (state_id x = 0; x < n_; ++x)
                for (auto e = c_.edge_begin(x); e < c_.edge_end(x); ++e)
                    record_of_edge_[e] = x;
            if (strategy_ == strategy::counting)
                counts_ = outdeg_;
            else
                sums_ = totals_;
        }
    }

    // Weight or count of x's edges into the current splitter, per label.
    weight& acc(std::size_t slot, std::size_t label) { return acc_[slot * labels_ + label]; }

    key counting_key(std::uint32_t out, std::uint32_t in_b, std::uint32_t in_s) const
    {
        bool part[3] = {out > in_b, in_b > in_s, in_s > 0};
        if (kind_.is<powerset_functor>()) {
            color_set p;
            for (unsigned col = 0; col < 3; ++col)
                if (part[col])
                    p.mask |= static_cast<std::uint8_t>(1u << col);
            return key(3, p);
        }
        return key(3, weight_vector{{weight(part[0]), weight(part[1]), weight(part[2])}});
    }

    // Parts for one label from total, weight into B and weight into S.
    std::vector<weight> summing_parts(const weight& total, const weight* in_b, const weight& in_s) const
    {
        if (mode_ == refinement_mode::cancellative)
            return {total - in_s, in_s};
        return {total - *in_b, *in_b - in_s, in_s};
    }

    key summing_key(state_id x, const weight* in_b, const weight* in_s) const
    {
        const unsigned level = mode_ == refinement_mode::general ? 3 : 2;
        if (!kind_.is<lmc_functor>())
            return key(level, weight_vector{summing_parts(totals_[x], in_b, in_s[0])});
        label_rows p;
        p.rows.resize(labels_);
        for (std::size_t a = 0; a < labels_; ++a)
            if (c_.defined(x, a))
                p.rows[a] = summing_parts(totals_[x * labels_ + a], in_b ? in_b + a : nullptr, in_s[a]);
        return key(level, std::move(p));
    }

    template <typename ColorOf>
    key direct_key(state_id x, unsigned level, ColorOf color) const
    {
        term_shape p{c_.head(x), {}};
        for (auto y : c_.successors(x))
            p.colors.push_back(color(y));
        return key(level, std::move(p));
    }

    key touched_key(std::size_t slot, block_id s, compound_id b, compound_id k) const
    {
        const state_id x = touched_[slot];
        const bool general = mode_ == refinement_mode::general;
        switch (strategy_) {
        case strategy::counting:
            return counting_key(outdeg_[x], counts_[old_record_[slot]], acc_counts_[slot]);
        case strategy::summing:
            return summing_key(x, general ? &sums_[old_record_[slot] * labels_] : nullptr,
                               &acc_[slot * labels_]);
        case strategy::direct:
            if (general)
                return direct_key(x, 3, [&](state_id y) -> std::uint8_t {
                    auto blk = block_of_[y];
                    if (blk == s)
                        return 2;
                    auto cmp = compound_of_block_[blk];
                    return (cmp == b || cmp == k) ? 1 : 0;
                });
            return direct_key(x, 2, [&](state_id y) -> std::uint8_t { return block_of_[y] == s ? 1 : 0; });
        }
        return {};
    }

    // F chi_{empty}^B(c(y)) (general) or F chi_{empty}(c(y)) (cancellative),
    // shared by all states of a block after stabilisation; read off a
    // touched representative.
    key residue_key(std::size_t slot, compound_id b, compound_id k) const
    {
        const state_id x = touched_[slot];
        const bool general = mode_ == refinement_mode::general;
        switch (strategy_) {
        case strategy::counting:
            return counting_key(outdeg_[x], counts_[old_record_[slot]], 0);
        case strategy::summing: {
            std::vector<weight> none(labels_, zero_);
            return summing_key(x, general ? &sums_[old_record_[slot] * labels_] : nullptr, none.data());
        }
        case strategy::direct:
            if (general)
                return direct_key(x, 3, [&](state_id y) -> std::uint8_t {
                    auto cmp = compound_of_block_[block_of_[y]];
                    return (cmp == b || cmp == k) ? 1 : 0;
                });
            return direct_key(x, 2, [](state_id) -> std::uint8_t { return 0; });
        }
        return {};
    }

    void refine(block_id s, compound_id b, compound_id k, split_event& event)
    {
        const bool general = mode_ == refinement_mode::general;
        const bool aggregated = general && strategy_ != strategy::direct;
        touched_.clear();
        acc_.clear();
        acc_counts_.clear();
        old_record_.clear();

        for (auto pos = blocks_[s].begin; pos < blocks_[s].end; ++pos) {
            const state_id y = elements_[pos];
            for (auto i = rev_.offsets[y]; i < rev_.offsets[y + 1]; ++i) {
                const auto e = rev_.edges[i];
                const state_id x = rev_.sources[i];
                if (slot_of_[x] < 0) {
                    slot_of_[x] = static_cast<std::int32_t>(touched_.size());
                    touched_.push_back(x);
                    if (strategy_ == strategy::counting)
                        acc_counts_.push_back(0);
                    else if (strategy_ == strategy::summing)
                        acc_.resize(acc_.size() + labels_, zero_);
                    if (aggregated)
                        old_record_.push_back(record_of_edge_[e]);
                }
                const auto slot = static_cast<std::size_t>(slot_of_[x]);
                if (strategy_ == strategy::counting)
                    ++acc_counts_[slot];
                else if (strategy_ == strategy::summing)
                    acc(slot, c_.slot(e)) += c_.edge_weight(e);
            }
        }
        result_.stats.touched_states += size(s) + touched_.size();

        auto& keys = keys_;
        keys.clear();
        keys.reserve(touched_.size());
        for (std::size_t i = 0; i < touched_.size(); ++i)
            keys.push_back(touched_key(i, s, b, k));

        // Bucket touched states by parent block in order of first touch.
        auto& parents = parents_;
        parents.clear();
        for (auto x : touched_) {
            auto t = block_of_[x];
            if (parent_count_.size() <= t)
                parent_count_.resize(blocks_.size(), 0);
            if (parent_count_[t]++ == 0)
                parents.push_back(t);
        }
        auto& offset = offset_;
        offset.assign(parents.size() + 1, 0);
        for (std::size_t p = 0; p < parents.size(); ++p) {
            offset[p + 1] = offset[p] + parent_count_[parents[p]];
            parent_count_[parents[p]] = static_cast<std::uint32_t>(p);
        }
        auto& by_parent = by_parent_;
        by_parent.resize(touched_.size());
        {
            auto& fill = fill_;
            fill = offset;
            for (std::size_t i = 0; i < touched_.size(); ++i)
                by_parent[fill[parent_count_[block_of_[touched_[i]]]]++] = static_cast<std::uint32_t>(i);
        }
        for (auto t : parents)
            parent_count_[t] = 0;

        struct plan
        {
            block_id parent;
            std::vector<key> keys;
            std::vector<std::vector<state_id>> members;
            std::ptrdiff_t retained;
            bool residue;
        };
        std::vector<plan> plans;
        for (std::size_t p = 0; p < parents.size(); ++p) {
            plan pl{parents[p], {}, {}, 0, false};
            // Few distinct keys per parent is the common case; scan linearly
            // until the group count makes hashing worthwhile.
            std::unordered_map<key, std::size_t, key_hash> group_of;
            auto group = [&](const key& kk) -> std::ptrdiff_t {
                if (pl.keys.size() <= small_groups) {
                    for (std::size_t g = 0; g < pl.keys.size(); ++g)
                        if (pl.keys[g] == kk)
                            return static_cast<std::ptrdiff_t>(g);
                    return -1;
                }
                if (group_of.empty())
                    for (std::size_t g = 0; g < pl.keys.size(); ++g)
                        group_of.emplace(pl.keys[g], g);
                auto it = group_of.find(kk);
                return it == group_of.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
            };
            for (auto i = offset[p]; i < offset[p + 1]; ++i) {
                const auto slot = by_parent[i];
                auto g = group(keys[slot]);
                if (g < 0) {
                    g = static_cast<std::ptrdiff_t>(pl.keys.size());
                    pl.keys.push_back(keys[slot]);
                    pl.members.emplace_back().reserve(pl.keys.size() == 1 ? offset[p + 1] - offset[p] : 0);
                    if (!group_of.empty())
                        group_of.emplace(pl.keys.back(), static_cast<std::size_t>(g));
                }
                pl.members[static_cast<std::size_t>(g)].push_back(touched_[slot]);
            }
            const auto touched_here = offset[p + 1] - offset[p];
            if (touched_here < size(pl.parent)) {
                pl.residue = true;
                auto rk = residue_key(by_parent[offset[p]], b, k);
                if (auto g = group(rk); g >= 0) {
                    pl.retained = g;
                } else {
                    pl.retained = static_cast<std::ptrdiff_t>(pl.keys.size());
                    pl.keys.push_back(std::move(rk));
                    pl.members.emplace_back();
                }
            }
            if (pl.keys.size() >= 2)
                plans.push_back(std::move(pl));
        }

        if (aggregated) {
            auto& fresh = fill_;
            fresh.resize(touched_.size());
            for (std::size_t i = 0; i < touched_.size(); ++i) {
                if (strategy_ == strategy::counting) {
                    fresh[i] = static_cast<std::uint32_t>(counts_.size());
                    counts_.push_back(acc_counts_[i]);
                    counts_[old_record_[i]] -= acc_counts_[i];
                } else {
                    fresh[i] = static_cast<std::uint32_t>(sums_.size() / labels_);
                    for (std::size_t a = 0; a < labels_; ++a) {
                        sums_.push_back(acc(i, a));
                        sums_[old_record_[i] * labels_ + a] -= acc(i, a);
                    }
                }
            }
            for (auto pos = blocks_[s].begin; pos < blocks_[s].end; ++pos) {
                const state_id y = elements_[pos];
                for (auto i = rev_.offsets[y]; i < rev_.offsets[y + 1]; ++i)
                    record_of_edge_[rev_.edges[i]] = fresh[slot_of_[rev_.sources[i]]];
            }
        }
        for (auto x : touched_)
            slot_of_[x] = -1;

        for (auto& pl : plans) {
            block_refinement r;
            r.parent = pl.parent;
            const auto cmp = compound_of_block_[pl.parent];
            r.children.push_back({pl.keys[pl.retained], pl.parent, {}, pl.residue});
            for (std::size_t g = 0; g < pl.keys.size(); ++g) {
                if (static_cast<std::ptrdiff_t>(g) == pl.retained)
                    continue;
                auto child = split_off(pl.parent, pl.members[g]);
                compound_of_block_.push_back(cmp);
                compounds_[cmp].count += 1;
                compounds_[cmp].heap.push({size(child), child});
                r.children.push_back({std::move(pl.keys[g]), child, std::move(pl.members[g]), false});
            }
            compounds_[cmp].heap.push({size(pl.parent), pl.parent});
            if (compounds_[cmp].count >= 2)
                enqueue(cmp);
            event.refinements.push_back(std::move(r));
        }
    }

    block_id split_off(block_id t, const std::vector<state_id>& members)
    {
        auto& range = blocks_[t];
        auto fresh = static_cast<block_id>(blocks_.size());
        std::uint32_t front = range.begin;
        for (auto x : members) {
            auto at = location_[x];
            auto other = elements_[front];
            std::swap(elements_[at], elements_[front]);
            location_[other] = at;
            location_[x] = front;
            block_of_[x] = fresh;
            ++front;
        }
        blocks_.push_back({range.begin, front});
        blocks_[t].begin = front;
        return fresh;
    }

    const coalgebra& c_;
    const functor_kind& kind_;
    refinement_mode mode_;
    std::size_t n_;
    reverse_edges rev_;
    strategy strategy_ = strategy::direct;
    std::size_t labels_ = 1;
    weight zero_;

    std::vector<state_id> elements_;
    std::vector<std::uint32_t> location_;
    std::vector<block_id> block_of_;
    std::vector<block_range> blocks_;
    std::vector<compound_id> compound_of_block_;
    std::vector<compound> compounds_;
    std::deque<compound_id> queue_;

    std::vector<std::uint32_t> outdeg_;
    std::vector<weight> totals_;
    std::vector<std::uint32_t> record_of_edge_;
    std::vector<std::uint32_t> counts_;
    std::vector<weight> sums_;

    std::vector<std::int32_t> slot_of_;
    std::vector<state_id> touched_;
    std::vector<weight> acc_;
    std::vector<std::uint32_t> acc_counts_;
    std::vector<std::uint32_t> old_record_;
    std::vector<std::uint32_t> parent_count_;
    std::vector<key> keys_;
    std::vector<block_id> parents_;
    std::vector<std::uint32_t> offset_;
    std::vector<std::uint32_t> by_parent_;
    std::vector<std::uint32_t> fill_;

    refinement_result result_;
};

} // namespace

refinement_result run(const coalgebra& c, refinement_mode mode) { return refiner(c, mode).run(); }

trace_replay::trace_replay(const refinement_trace& trace)
    : trace_(&trace), block_of_(trace.initial_block_of)
{
    compound_of_block_.assign(trace.init.size(), 0);
    compound_count_ = trace.init.empty() ? 0 : 1;
}

void trace_replay::step()
{
    const auto& event = trace_->events.at(next_++);
    compound_of_block_[event.splitter] = event.splitter_compound;
    compound_count_ = std::max<std::size_t>(compound_count_, event.splitter_compound + 1);
    for (const auto& r : event.refinements)
        for (const auto& child : r.children) {
            if (child.block == r.parent)
                continue;
            if (compound_of_block_.size() <= child.block)
                compound_of_block_.resize(child.block + 1);
            compound_of_block_[child.block] = compound_of_block_[r.parent];
            for (auto x : child.moved)
                block_of_[x] = child.block;
        }
}

void trace_replay::finish()
{
    while (!done())
        step();
}

nlohmann::json partition_to_json(const coalgebra& c, const std::vector<std::vector<state_id>>& blocks)
{
    auto out = nlohmann::json::array();
    for (const auto& b : blocks) {
        auto names = nlohmann::json::array();
        for (auto x : b)
            names.push_back(c.name(x));
        out.push_back(names);
    }
    return out;
}

nlohmann::json trace_to_json(const coalgebra& c, const refinement_trace& trace)
{
    using nlohmann::json;
    json j;
    j["mode"] = mode_name(trace.mode);
    json init = json::array();
    for (const auto& b : trace.init) {
        json states = json::array();
        for (state_id x = 0; x < trace.initial_block_of.size(); ++x)
            if (trace.initial_block_of[x] == b.block)
                states.push_back(c.name(x));
        init.push_back({{"block", b.block}, {"key", key_to_json(c.kind(), b.k)}, {"states", states}});
    }
    j["init"] = init;
    json events = json::array();
    for (const auto& e : trace.events) {
        json refinements = json::array();
        for (const auto& r : e.refinements) {
            json children = json::array();
            for (const auto& ch : r.children) {
                json moved = json::array();
                for (auto x : ch.moved)
                    moved.push_back(c.name(x));
                children.push_back({{"block", ch.block},
                                    {"key", key_to_json(c.kind(), ch.k)},
                                    {"residue", ch.residue},
                                    {"moved", moved}});
            }
            refinements.push_back({{"parent", r.parent}, {"children", children}});
        }
        events.push_back({{"iteration", e.iteration},
                          {"splitter", e.splitter},
                          {"splitterSize", e.splitter_size},
                          {"compound", e.compound},
                          {"splitterCompound", e.splitter_compound},
                          {"refinements", refinements}});
    }
    j["events"] = events;
    return j;
}

} // namespace coalcert
