#pragma once

#include "coalcert/coalgebra.hpp"
#include "coalcert/key.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <vector>

namespace coalcert {

using block_id = std::uint32_t;
using compound_id = std::uint32_t;

enum class refinement_mode
{
    // Refine by F chi_S^B; certificates use ternary modalities and negation.
    general,
    // Refine by F chi_S; only for cancellative kinds.
    cancellative,
};

enum class mode_request
{
    automatic,
    general,
    cancellative,
};

// automatic picks cancellative whenever the kind allows it. Throws
// mode_error when cancellative is requested for a non-cancellative kind.
[[nodiscard]] refinement_mode resolve_mode(const functor_kind& kind, mode_request request);

[[nodiscard]] const char* mode_name(refinement_mode mode);

struct initial_block
{
    key k;
    block_id block = 0;
};

// One class of a split block. The class that keeps the parent's id has
// block == parent and an empty moved list; residue marks the class that
// contains the states without an edge into the splitter.
struct child_block
{
    key k;
    block_id block = 0;
    std::vector<state_id> moved;
    bool residue = false;
};

struct block_refinement
{
    block_id parent = 0;
    std::vector<child_block> children;
};

// One iteration of the main loop: splitter block S was taken out of
// compound B (which keeps its id for B minus S) into a fresh compound.
struct split_event
{
    std::size_t iteration = 0;
    block_id splitter = 0;
    std::uint32_t splitter_size = 0;
    compound_id compound = 0;
    compound_id splitter_compound = 0;
    std::vector<block_refinement> refinements;
};

struct refinement_trace
{
    refinement_mode mode = refinement_mode::general;
    std::size_t state_count = 0;
    std::vector<block_id> initial_block_of;
    std::vector<initial_block> init;
    std::vector<split_event> events;
};

struct refinement_stats
{
    std::size_t iterations = 0;
    // Sum over splitters S of |S| plus the number of distinct predecessors.
    std::uint64_t touched_states = 0;
    // How often each state was part of the chosen splitter.
    std::vector<std::uint32_t> splitter_occurrences;

    [[nodiscard]] std::uint32_t max_splitter_occurrences() const;
};

struct refinement_result
{
    std::vector<block_id> block_of;
    std::size_t block_count = 0;
    refinement_trace trace;
    refinement_stats stats;

    // Blocks ordered by their smallest state, states ascending.
    [[nodiscard]] std::vector<std::vector<state_id>> blocks() const;
};

// Computes behavioural equivalence of c by partition refinement in
// O((m + n) log n) key computations. Throws mode_error when the mode is
// cancellative and the kind is not.
[[nodiscard]] refinement_result run(const coalgebra& c, refinement_mode mode);

// Replays a trace, exposing the partition and compounds between events.
class trace_replay
{
public:
    explicit trace_replay(const refinement_trace& trace);

    [[nodiscard]] bool done() const { return next_ == trace_->events.size(); }
    [[nodiscard]] std::size_t position() const { return next_; }
    void step();
    void finish();

    [[nodiscard]] const std::vector<block_id>& block_of() const { return block_of_; }
    [[nodiscard]] const std::vector<compound_id>& compound_of_block() const { return compound_of_block_; }
    [[nodiscard]] std::size_t block_count() const { return compound_of_block_.size(); }
    [[nodiscard]] std::size_t compound_count() const { return compound_count_; }

private:
    const refinement_trace* trace_;
    std::size_t next_ = 0;
    std::vector<block_id> block_of_;
    std::vector<compound_id> compound_of_block_;
    std::size_t compound_count_ = 0;
};

[[nodiscard]] std::vector<std::vector<state_id>> blocks_of(const std::vector<block_id>& block_of);

[[nodiscard]] nlohmann::json trace_to_json(const coalgebra& c, const refinement_trace& trace);
[[nodiscard]] nlohmann::json partition_to_json(const coalgebra& c,
                                               const std::vector<std::vector<state_id>>& blocks);

} // namespace coalcert
