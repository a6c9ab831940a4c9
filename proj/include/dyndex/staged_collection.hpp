#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "dyndex/level_layout.hpp"
#include "dyndex/top_scheduler.hpp"

namespace dyndex {

/// Tuning of the staged (worst-case) hierarchy.
struct staged_options {
    double epsilon = 0.5;
    /// 0 picks ceil(log2 log2 n) from initial_size.
    unsigned tau = 0;
    /// Expected collection size; only used for the default tau.
    std::uint64_t initial_size = 0;
    std::uint64_t seed = 1;
};

/// Counters describing the background work of the most recent update and
/// the run so far.
struct staged_work {
    std::uint64_t last_update_work = 0;
    std::uint64_t last_update_size = 0;
    double max_work_ratio = 0;            // max over updates of work / update size
    double max_normalized_work = 0;       // same ratio divided by log^eps(n) * (r + 1)
    std::uint64_t fed_symbols = 0;        // symbols consumed by background builds
    std::uint64_t immediate_symbols = 0;  // symbols of builds done inside the update
    std::uint64_t forced_completions = 0; // pending builds finished early because of a conflict
    std::uint64_t relock_conflicts = 0;   // a level had to be locked while its previous lock was alive
    std::uint64_t rounds = 0;
    std::uint64_t nf_changes = 0;
};

/// Snapshot of one holder for statistics and invariant checks.
struct holder_info {
    enum class kind { tree, level, locked, temp, top, locked_top, draining };
    kind role;
    std::size_t slot = 0;
    bool single = false;
    bool in_job = false;
    std::uint64_t alive_symbols = 0;
    std::uint64_t deleted_symbols = 0;
    std::uint64_t items = 0;
    std::uint64_t m = 0;  // top deletions counted by the purge scheduler
};

/// Engine shared by the document index and the binary relation: a dynamic
/// holder C0, capped static levels C1..Cr, locked copies L_j, single-item
/// Temp holders, top holders T_i and L'_r. Rebuilds run as jobs that are fed
/// a fixed budget per updated symbol, so no single update does more than a
/// bounded amount of construction work.
///
/// Family supplies the item and holder types:
///   item_id, payload, tree, block, config
///   size(payload), make_tree(seed), tree_insert, tree_erase, tree_items, tree_symbols, tree_ops,
///   build(items, config), block_erase(block, id) -> mark ops, block_items, block_alive,
///   block_deleted, block_total, block_count
template <class Family>
class staged_collection {
public:
    using item_id = typename Family::item_id;
    using payload = typename Family::payload;
    using item = std::pair<item_id, payload>;
    using tree = typename Family::tree;
    using block = typename Family::block;
    using config = typename Family::config;

    staged_collection(staged_options opts, config cfg);

    void insert(item_id id, payload p);
    void erase(item_id id);
    bool contains(item_id id) const { return where_.count(id) != 0; }
    std::uint64_t size() const { return n_; }
    std::uint64_t item_count() const { return where_.size(); }

    /// Calls f(const tree&) or f(const block&) for every queryable holder.
    template <class F>
    void for_each_holder(F&& f) const;

    /// Completes every pending job.
    void settle();

    std::uint64_t nf() const { return nf_; }
    unsigned tau() const { return tau_; }
    double epsilon() const { return opts_.epsilon; }
    const level_layout& layout() const { return layout_; }
    double delta() const { return delta_; }
    /// Upper bound on any top's scheduler counter: (1 + h_{2 tau}) * delta.
    double top_deletion_bound() const { return (1.0 + harmonic(2 * tau_)) * delta_; }
    /// Budget of background symbols per updated symbol for level builds.
    std::uint64_t level_rate() const { return level_rate_; }
    const staged_work& work() const { return work_; }
    std::size_t pending_jobs() const { return jobs_.size(); }
    std::vector<holder_info> holders() const;
    /// Structural invariants; empty string when all hold.
    std::string validate() const;

    void save(std::ostream& out);
    static staged_collection load(std::istream& in, config cfg);

private:
    static constexpr std::size_t tops_slot = static_cast<std::size_t>(-1);

    enum class role { tree, level, locked, temp, top, locked_top, draining };
    enum class driver { updates, deletions };
    enum class job_kind { level_merge, top_merge, purge, maintenance };
    enum class input_state : std::uint8_t { alive, dropped, replay };

    struct holder {
        std::variant<tree, block> data;
        role r;
        std::size_t slot = 0;
        bool single = false;
        std::int64_t job = -1;
    };

    struct job {
        std::size_t target = 0;  // level slot, or tops_slot
        job_kind what = job_kind::level_merge;
        driver drive = driver::updates;
        std::uint64_t rate = 1;  // symbols fed per driving symbol
        std::vector<item> inputs;
        std::vector<std::uint64_t> start;  // prefix offsets of inputs
        std::unordered_map<item_id, std::size_t, typename Family::hash> index;
        std::vector<input_state> state;
        std::uint64_t total = 0;
        std::uint64_t fed = 0;
        std::uint64_t alive = 0;
        std::vector<std::uint64_t> sources;
    };

    std::uint64_t add_holder(holder h);
    void drop_holder(std::uint64_t id);
    std::uint64_t holder_alive(const holder& h) const;
    std::uint64_t holder_deleted(const holder& h) const;
    std::uint64_t holder_count(const holder& h) const;
    std::vector<item> holder_items(const holder& h) const;
    std::optional<std::uint64_t> build_block(std::vector<item> items, role r, std::size_t slot, bool single);
    void apply_replay(std::uint64_t holder_id, const std::vector<item_id>& replay);

    std::uint64_t slot_size(std::size_t j) const;
    std::optional<std::uint64_t> job_for_slot(std::size_t j) const;
    std::optional<std::uint64_t> top_merge_job() const;

    void start_job(std::size_t target, job_kind what, driver d, const std::vector<std::uint64_t>& sources);
    void feed(std::uint64_t job_id, std::uint64_t symbols);
    void complete(std::uint64_t job_id);
    void force(std::uint64_t job_id, bool relock);
    void advance(driver d, std::uint64_t symbols);
    void tombstone(std::uint64_t job_id, const item_id& id, std::uint64_t size);
    void emit_tops(std::vector<item> items, const std::vector<item_id>& replay, std::uint64_t inherited);

    void route(item_id id, payload p);
    void lock_level(std::size_t j, std::optional<item> extra);
    void cleanup();
    void level_overflow(std::size_t j);
    bool eligible_top(std::uint64_t id) const;
    void fold_locked_top(std::optional<std::uint64_t> selected_job);
    void end_round();
    void grow_nf();
    void shrink_nf();
    void refresh_parameters();
    void finish_update(std::uint64_t size);

    staged_options opts_;
    config cfg_;
    unsigned tau_ = 2;
    std::uint64_t nf_ = 64;
    level_layout layout_;
    double delta_ = 1;
    std::uint64_t level_rate_ = 1;
    top_purge_scheduler sched_;

    std::map<std::uint64_t, holder> holders_;
    std::uint64_t next_holder_ = 1;
    std::vector<std::optional<std::uint64_t>> level_;  // slot -> holder; slot 0 is the tree
    std::optional<std::uint64_t> locked_top_;          // L'_r before it is folded
    std::vector<std::uint64_t> tops_;

    std::map<std::uint64_t, job> jobs_;
    std::uint64_t next_job_ = 1;

    std::unordered_map<item_id, std::uint64_t, typename Family::hash> where_;
    std::uint64_t n_ = 0;
    std::uint64_t update_work_ = 0;
    std::uint64_t reseed_ = 0;
    staged_work work_;
};

}  // namespace dyndex

#include "dyndex/staged_collection_impl.hpp"
