#pragma once

// Member definitions of staged_collection; included from staged_collection.hpp.

#include <istream>
#include <ostream>

#include "dyndex/binary_io.hpp"
#include "dyndex/routing.hpp"

namespace dyndex {

namespace staged_detail {
constexpr std::uint64_t min_nf = 64;
}

template <class Family>
staged_collection<Family>::staged_collection(staged_options opts, config cfg)
    : opts_(opts), cfg_(std::move(cfg)) {
    tau_ = std::max(2u, opts_.tau ? opts_.tau : default_tau(opts_.initial_size));
    nf_ = staged_detail::min_nf;
    refresh_parameters();
    level_[0] = add_holder(holder{Family::make_tree(opts_.seed), role::tree, 0});
}

template <class Family>
void staged_collection<Family>::refresh_parameters() {
    layout_ = level_layout::staged(nf_, opts_.epsilon, tau_);
    delta_ = static_cast<double>(purge_round_length(nf_, tau_));
    sched_.set_delta(static_cast<std::uint64_t>(delta_));
    level_rate_ = static_cast<std::uint64_t>(std::ceil(2.0 * (std::pow(layout_.log_n, opts_.epsilon) + 2.0)));
    if (level_.size() < layout_.caps.size()) level_.resize(layout_.caps.size());
}

// ---------------------------------------------------------------- holders

template <class Family>
std::uint64_t staged_collection<Family>::add_holder(holder h) {
    const std::uint64_t id = next_holder_++;
    holders_.emplace(id, std::move(h));
    return id;
}

template <class Family>
void staged_collection<Family>::drop_holder(std::uint64_t id) {
    auto it = holders_.find(id);
    if (it == holders_.end()) return;
    if (it->second.r == role::top) {
        tops_.erase(std::remove(tops_.begin(), tops_.end(), id), tops_.end());
        sched_.remove_top(id);
    }
    if (locked_top_ == id) locked_top_.reset();
    for (auto& slot : level_)
        if (slot == id) slot.reset();
    holders_.erase(it);
}

template <class Family>
std::uint64_t staged_collection<Family>::holder_alive(const holder& h) const {
    if (const auto* t = std::get_if<tree>(&h.data)) return Family::tree_symbols(*t);
    return Family::block_alive(std::get<block>(h.data));
}

template <class Family>
std::uint64_t staged_collection<Family>::holder_deleted(const holder& h) const {
    if (std::holds_alternative<tree>(h.data)) return 0;
    return Family::block_deleted(std::get<block>(h.data));
}

template <class Family>
std::vector<typename staged_collection<Family>::item> staged_collection<Family>::holder_items(const holder& h) const {
    if (const auto* t = std::get_if<tree>(&h.data)) return Family::tree_items(*t);
    return Family::block_items(std::get<block>(h.data));
}

template <class Family>
std::uint64_t staged_collection<Family>::holder_count(const holder& h) const {
    if (const auto* t = std::get_if<tree>(&h.data)) return Family::tree_count(*t);
    return Family::block_count(std::get<block>(h.data));
}

template <class Family>
std::optional<std::uint64_t> staged_collection<Family>::build_block(std::vector<item> items, role r,
                                                                   std::size_t slot, bool single) {
    if (items.empty()) return std::nullopt;
    std::vector<item_id> ids;
    ids.reserve(items.size());
    for (const auto& it : items) ids.push_back(it.first);
    const auto id = add_holder(holder{Family::build(std::move(items), cfg_), r, slot, single});
    for (const auto& x : ids) where_[x] = id;
    if (r == role::top) {
        tops_.push_back(id);
        sched_.add_top(id);
    }
    return id;
}

template <class Family>
std::uint64_t staged_collection<Family>::slot_size(std::size_t j) const {
    if (auto k = job_for_slot(j)) return jobs_.at(*k).alive;
    if (j < level_.size() && level_[j]) return holder_alive(holders_.at(*level_[j]));
    return 0;
}

template <class Family>
std::optional<std::uint64_t> staged_collection<Family>::job_for_slot(std::size_t j) const {
    for (const auto& [id, jb] : jobs_)
        if (jb.target == j) return id;
    return std::nullopt;
}

template <class Family>
std::optional<std::uint64_t> staged_collection<Family>::top_merge_job() const {
    for (const auto& [id, jb] : jobs_)
        if (jb.what == job_kind::top_merge) return id;
    return std::nullopt;
}

// ------------------------------------------------------------------- jobs

template <class Family>
void staged_collection<Family>::start_job(std::size_t target, job_kind what, driver d,
                                          const std::vector<std::uint64_t>& sources) {
    job jb;
    jb.target = target;
    jb.what = what;
    jb.drive = d;
    const std::uint64_t jid = next_job_++;
    for (const auto s : sources) {
        auto& h = holders_.at(s);
        h.job = static_cast<std::int64_t>(jid);
        sched_.reset(s);
        for (auto& it : holder_items(h)) jb.inputs.push_back(std::move(it));
        jb.sources.push_back(s);
    }
    jb.state.assign(jb.inputs.size(), input_state::alive);
    for (std::size_t i = 0; i < jb.inputs.size(); ++i) {
        jb.start.push_back(jb.total);
        jb.index.emplace(jb.inputs[i].first, i);
        jb.total += Family::size(jb.inputs[i].second);
    }
    jb.alive = jb.total;
    const double total = static_cast<double>(jb.total);
    switch (what) {
        case job_kind::level_merge:
        case job_kind::top_merge:
            jb.rate = level_rate_;
            break;
        case job_kind::purge:
            jb.rate = static_cast<std::uint64_t>(std::ceil(total / delta_));
            break;
        case job_kind::maintenance:
            jb.rate = static_cast<std::uint64_t>(std::ceil(total / (2.0 * delta_)));
            break;
    }
    jb.rate = std::max<std::uint64_t>(jb.rate, 1);
    jobs_.emplace(jid, std::move(jb));
    if (jobs_.at(jid).total == 0) complete(jid);
}

template <class Family>
void staged_collection<Family>::feed(std::uint64_t jid, std::uint64_t symbols) {
    auto& jb = jobs_.at(jid);
    const std::uint64_t amount = std::min(symbols, jb.total - jb.fed);
    jb.fed += amount;
    update_work_ += amount;
    work_.fed_symbols += amount;
    if (jb.fed == jb.total) complete(jid);
}

template <class Family>
void staged_collection<Family>::force(std::uint64_t jid, bool relock) {
    ++work_.forced_completions;
    if (relock) ++work_.relock_conflicts;
    const auto& jb = jobs_.at(jid);
    feed(jid, jb.total - jb.fed);
}

template <class Family>
void staged_collection<Family>::advance(driver d, std::uint64_t symbols) {
    std::vector<std::uint64_t> ids;
    for (const auto& [id, jb] : jobs_)
        if (jb.drive == d) ids.push_back(id);
    for (const auto id : ids) {
        auto it = jobs_.find(id);
        if (it != jobs_.end()) feed(id, it->second.rate * symbols);
    }
}

template <class Family>
void staged_collection<Family>::tombstone(std::uint64_t jid, const item_id& id, std::uint64_t size) {
    auto& jb = jobs_.at(jid);
    const auto i = jb.index.at(id);
    jb.state[i] = jb.start[i] < jb.fed ? input_state::replay : input_state::dropped;
    jb.alive -= size;
}

template <class Family>
void staged_collection<Family>::complete(std::uint64_t jid) {
    job jb = std::move(jobs_.at(jid));
    jobs_.erase(jid);
    std::vector<item> items;
    std::vector<item_id> replay;
    for (std::size_t i = 0; i < jb.inputs.size(); ++i) {
        if (jb.state[i] == input_state::dropped) continue;
        if (jb.state[i] == input_state::replay) replay.push_back(jb.inputs[i].first);
        items.push_back(std::move(jb.inputs[i]));
    }
    std::uint64_t inherited = 0;
    for (const auto s : jb.sources) inherited += sched_.m(s);
    for (const auto s : jb.sources) drop_holder(s);
    if (jb.target == tops_slot) {
        emit_tops(std::move(items), replay, inherited);
        return;
    }
    if (level_[jb.target]) throw std::logic_error("staged_collection: level slot occupied at swap-in");
    std::vector<std::pair<item_id, std::uint64_t>> prior;
    for (const auto& id : replay)
        if (auto it = where_.find(id); it != where_.end()) prior.emplace_back(id, it->second);
    level_[jb.target] = build_block(std::move(items), role::level, jb.target, false);
    if (level_[jb.target]) apply_replay(*level_[jb.target], replay);
    for (const auto& [id, h] : prior) where_[id] = h;
}

template <class Family>
void staged_collection<Family>::apply_replay(std::uint64_t holder_id, const std::vector<item_id>& replay) {
    auto& b = std::get<block>(holders_.at(holder_id).data);
    for (const auto& id : replay) {
        if (!Family::block_contains(b, id)) continue;
        update_work_ += Family::block_erase(b, id);
        if (auto it = where_.find(id); it != where_.end() && it->second == holder_id) where_.erase(it);
    }
}

template <class Family>
void staged_collection<Family>::emit_tops(std::vector<item> items, const std::vector<item_id>& replay,
                                          std::uint64_t inherited) {
    std::vector<std::uint64_t> sizes;
    sizes.reserve(items.size());
    for (const auto& x : items) sizes.push_back(Family::size(x.second));
    const auto packing = pack_tops(sizes, nf_, tau_);
    std::vector<std::vector<item>> groups(packing.size());
    for (std::size_t g = 0; g < packing.size(); ++g)
        for (const auto i : packing[g].items) groups[g].push_back(std::move(items[i]));

    std::vector<std::pair<item_id, std::uint64_t>> prior;
    for (const auto& id : replay)
        if (auto it = where_.find(id); it != where_.end()) prior.emplace_back(id, it->second);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto b = build_block(std::move(groups[g]), role::top, 0, packing[g].single);
        if (!b) continue;
        apply_replay(*b, replay);
        sched_.add_top(*b, std::min(inherited, holder_deleted(holders_.at(*b))));
    }
    for (const auto& [id, h] : prior) where_[id] = h;
}

template <class Family>
void staged_collection<Family>::settle() {
    while (!jobs_.empty()) {
        const auto jid = jobs_.begin()->first;
        const auto& jb = jobs_.at(jid);
        feed(jid, jb.total - jb.fed);
    }
    cleanup();
}

// --------------------------------------------------------------- policies

template <class Family>
void staged_collection<Family>::insert(item_id id, payload p) {
    if (where_.count(id)) throw std::invalid_argument("staged_collection: duplicate item");
    const std::uint64_t size = Family::size(p);
    update_work_ = 0;
    n_ += size;
    advance(driver::updates, size);
    route(id, std::move(p));
    cleanup();
    if (n_ >= 2 * nf_) grow_nf();
    finish_update(size);
}

template <class Family>
void staged_collection<Family>::route(item_id id, payload p) {
    const std::uint64_t size = Family::size(p);
    std::vector<std::uint64_t> sizes(layout_.caps.size());
    for (std::size_t j = 0; j < sizes.size(); ++j) sizes[j] = slot_size(j);
    const auto [action, j] = route_item(sizes, layout_.caps, size, nf_, tau_);
    switch (action) {
        case staged_action::single_top: {
            update_work_ += size;
            work_.immediate_symbols += size;
            std::vector<item> one;
            one.emplace_back(id, std::move(p));
            build_block(std::move(one), role::top, 0, true);
            return;
        }
        case staged_action::tree: {
            auto& t = std::get<tree>(holders_.at(*level_[0]).data);
            update_work_ += Family::tree_insert(t, id, p);
            where_[id] = *level_[0];
            return;
        }
        case staged_action::immediate: {
            if (auto k = job_for_slot(j)) force(*k, false);
            if (auto k = job_for_slot(j + 1)) force(*k, false);
            std::vector<item> items;
            for (const std::size_t s : {j, j + 1}) {
                if (!level_[s]) continue;
                for (auto& x : holder_items(holders_.at(*level_[s]))) items.push_back(std::move(x));
                drop_holder(*level_[s]);
            }
            if (j == 0) level_[0] = add_holder(holder{Family::make_tree(opts_.seed + ++reseed_), role::tree, 0});
            items.emplace_back(id, std::move(p));
            std::uint64_t total = 0;
            for (const auto& x : items) total += Family::size(x.second);
            update_work_ += total;
            work_.immediate_symbols += total;
            level_[j + 1] = build_block(std::move(items), role::level, j + 1, false);
            return;
        }
        case staged_action::lock:
        case staged_action::lock_last:
            lock_level(j, item{id, std::move(p)});
            return;
    }
}

template <class Family>
void staged_collection<Family>::lock_level(std::size_t j, std::optional<item> extra) {
    const std::size_t r = layout_.r();
    if (j < r) {
        if (auto k = job_for_slot(j + 1)) force(*k, true);
    } else if (auto k = top_merge_job()) {
        force(*k, true);
    }
    if (j > 0)
        if (auto k = job_for_slot(j)) force(*k, false);

    std::vector<std::uint64_t> sources;
    if (level_[j]) {
        holders_.at(*level_[j]).r = role::locked;
        sources.push_back(*level_[j]);
        level_[j].reset();
    }
    if (j == 0) level_[0] = add_holder(holder{Family::make_tree(opts_.seed + ++reseed_), role::tree, 0});
    if (j < r && level_[j + 1]) {
        holders_.at(*level_[j + 1]).r = role::draining;
        sources.push_back(*level_[j + 1]);
        level_[j + 1].reset();
    }
    if (extra) {
        const auto size = Family::size(extra->second);
        update_work_ += size;
        work_.immediate_symbols += size;
        std::vector<item> one;
        one.push_back(std::move(*extra));
        sources.push_back(*build_block(std::move(one), role::temp, j + 1, false));
    }
    if (sources.empty()) return;
    if (j < r)
        start_job(j + 1, job_kind::level_merge, driver::updates, sources);
    else
        start_job(tops_slot, job_kind::top_merge, driver::updates, sources);
}

template <class Family>
void staged_collection<Family>::erase(item_id id) {
    auto it = where_.find(id);
    if (it == where_.end()) throw std::out_of_range("staged_collection: unknown item");
    update_work_ = 0;
    const std::uint64_t hid = it->second;
    where_.erase(it);
    auto& h = holders_.at(hid);
    std::uint64_t size;
    if (auto* t = std::get_if<tree>(&h.data)) {
        size = Family::tree_item_size(*t, id);
        update_work_ += Family::tree_erase(*t, id);
    } else {
        auto& b = std::get<block>(h.data);
        size = Family::block_item_size(b, id);
        update_work_ += Family::block_erase(b, id);
    }
    n_ -= size;
    if (h.job >= 0) tombstone(static_cast<std::uint64_t>(h.job), id, size);
    const bool in_top = h.r == role::top;

    advance(driver::updates, size);
    cleanup();
    // Deletion-driven jobs advance piece by piece so a purge scheduled at a
    // round boundary is fed by the rest of the same deletion.
    for (std::uint64_t left = size; left > 0;) {
        const std::uint64_t piece = std::min(left, sched_.delta() - sched_.progress());
        advance(driver::deletions, piece);
        sched_.record(in_top ? std::optional<std::uint64_t>(hid) : std::nullopt, piece, [this] { end_round(); });
        left -= piece;
    }
    cleanup();
    if (nf_ > staged_detail::min_nf && 2 * n_ <= nf_) shrink_nf();
    finish_update(size);
}

template <class Family>
void staged_collection<Family>::cleanup() {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t j = 1; j < level_.size(); ++j) {
            if (!level_[j]) continue;
            const auto& h = holders_.at(*level_[j]);
            if (h.job >= 0 || 2 * holder_deleted(h) < layout_.caps[std::min(j, layout_.r())]) continue;
            level_overflow(j);
            changed = true;
            break;
        }
    }
    std::vector<std::uint64_t> empty;
    for (const auto& [id, h] : holders_)
        if (h.r != role::tree && h.job < 0 && holder_count(h) == 0) empty.push_back(id);
    for (const auto id : empty) drop_holder(id);
}

template <class Family>
void staged_collection<Family>::level_overflow(std::size_t j) {
    const std::size_t r = layout_.r();
    if (j < r) {
        if (holder_alive(holders_.at(*level_[j])) + slot_size(j + 1) <= layout_.caps[j + 1]) {
            lock_level(j, std::nullopt);
            return;
        }
        // Too large to merge upwards: purge in place.
        const auto hid = *level_[j];
        holders_.at(hid).r = role::locked;
        level_[j].reset();
        start_job(j, job_kind::level_merge, driver::updates, {hid});
        return;
    }
    if (locked_top_) {
        ++work_.relock_conflicts;
        fold_locked_top(std::nullopt);
    }
    locked_top_ = *level_[r];
    holders_.at(*locked_top_).r = role::locked_top;
    level_[r].reset();
}

template <class Family>
bool staged_collection<Family>::eligible_top(std::uint64_t id) const {
    const auto& h = holders_.at(id);
    return h.r == role::top && h.job < 0;
}

template <class Family>
void staged_collection<Family>::fold_locked_top(std::optional<std::uint64_t> selected_job) {
    const auto lt = *locked_top_;
    locked_top_.reset();
    auto& h = holders_.at(lt);
    h.r = role::draining;
    if (locked_top_stands_alone(holder_alive(h), nf_, tau_)) {
        start_job(tops_slot, job_kind::purge, driver::deletions, {lt});
        return;
    }
    std::optional<std::uint64_t> largest;
    std::uint64_t best = 0;
    for (const auto t : tops_) {
        const auto& th = holders_.at(t);
        if (th.single || th.r != role::top) continue;
        if (th.job >= 0 && (!selected_job || th.job != static_cast<std::int64_t>(*selected_job))) continue;
        const auto a = holder_alive(th);
        if (!largest || a > best) {
            largest = t;
            best = a;
        }
    }
    if (largest && selected_job && holders_.at(*largest).job == static_cast<std::int64_t>(*selected_job)) {
        // Fold into the purge that was just scheduled.
        auto& jb = jobs_.at(*selected_job);
        h.job = static_cast<std::int64_t>(*selected_job);
        for (auto& x : holder_items(h)) {
            jb.start.push_back(jb.total);
            jb.index.emplace(x.first, jb.inputs.size());
            jb.total += Family::size(x.second);
            jb.alive += Family::size(x.second);
            jb.inputs.push_back(std::move(x));
            jb.state.push_back(input_state::alive);
        }
        jb.sources.push_back(lt);
        jb.rate = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(static_cast<double>(jb.total) / delta_)));
        return;
    }
    std::vector<std::uint64_t> sources{lt};
    if (largest) {
        sources.push_back(*largest);
        sched_.reset(*largest);
    }
    start_job(tops_slot, job_kind::purge, driver::deletions, sources);
}

template <class Family>
void staged_collection<Family>::end_round() {
    ++work_.rounds;
    auto sel = sched_.argmax([this](std::uint64_t k) { return eligible_top(k); });
    std::optional<std::uint64_t> selected_job;
    if (sel && sched_.m(*sel) > 0) {
        std::vector<std::uint64_t> sources{*sel};
        sched_.reset(*sel);
        const auto& h = holders_.at(*sel);
        if (!h.single && holder_alive(h) * tau_ < nf_) {
            std::optional<std::uint64_t> partner;
            std::uint64_t best = 0;
            for (const auto t : tops_) {
                if (t == *sel || !eligible_top(t) || holders_.at(t).single) continue;
                const auto a = holder_alive(holders_.at(t));
                if (!partner || a < best) {
                    partner = t;
                    best = a;
                }
            }
            if (partner) {
                sources.push_back(*partner);
                sched_.reset(*partner);
            }
        }
        selected_job = next_job_;
        start_job(tops_slot, job_kind::purge, driver::deletions, sources);
        if (!jobs_.count(*selected_job)) selected_job.reset();
    }
    if (locked_top_) fold_locked_top(selected_job);
}

template <class Family>
void staged_collection<Family>::grow_nf() {
    ++work_.nf_changes;
    nf_ = n_;
    refresh_parameters();
    std::vector<std::uint64_t> small;
    for (const auto t : tops_)
        if (eligible_top(t) && holder_alive(holders_.at(t)) * tau_ < nf_) small.push_back(t);
    if (small.size() >= 2) start_job(tops_slot, job_kind::maintenance, driver::updates, small);
}

template <class Family>
void staged_collection<Family>::shrink_nf() {
    const std::uint64_t target = std::max(n_, staged_detail::min_nf);
    if (target >= nf_) return;
    ++work_.nf_changes;
    nf_ = target;
    refresh_parameters();
    for (auto& [id, jb] : jobs_) {
        if (jb.target == tops_slot) continue;
        jb.target = tops_slot;
        jb.what = job_kind::maintenance;
    }
    std::vector<std::uint64_t> sources;
    for (auto& slot : level_) {
        if (!slot) continue;
        auto& h = holders_.at(*slot);
        if (holder_count(h) > 0) {
            h.r = role::draining;
            sources.push_back(*slot);
        } else {
            holders_.erase(*slot);
        }
        slot.reset();
    }
    if (locked_top_) {
        holders_.at(*locked_top_).r = role::draining;
        sources.push_back(*locked_top_);
        locked_top_.reset();
    }
    for (const auto t : tops_) {
        const auto& h = holders_.at(t);
        if (!eligible_top(t)) continue;
        const bool oversized = !h.single && holder_alive(h) * tau_ > 4 * nf_;
        if (oversized || static_cast<double>(sched_.m(t)) > delta_) sources.push_back(t);
    }
    for (const auto s : sources) {
        auto& h = holders_.at(s);
        if (h.r == role::top) {
            tops_.erase(std::remove(tops_.begin(), tops_.end(), s), tops_.end());
            sched_.remove_top(s);
            h.r = role::draining;
        }
    }
    level_.clear();
    level_.resize(layout_.caps.size());
    level_[0] = add_holder(holder{Family::make_tree(opts_.seed + ++reseed_), role::tree, 0});
    if (!sources.empty()) start_job(tops_slot, job_kind::maintenance, driver::updates, sources);
}

template <class Family>
void staged_collection<Family>::finish_update(std::uint64_t size) {
    work_.last_update_work = update_work_;
    work_.last_update_size = size;
    const double ratio = static_cast<double>(update_work_) / static_cast<double>(std::max<std::uint64_t>(size, 1));
    work_.max_work_ratio = std::max(work_.max_work_ratio, ratio);
    const double scale = std::pow(layout_.log_n, opts_.epsilon) * static_cast<double>(layout_.r() + 1);
    work_.max_normalized_work = std::max(work_.max_normalized_work, ratio / scale);
}

// ----------------------------------------------------------- inspection

template <class Family>
template <class F>
void staged_collection<Family>::for_each_holder(F&& f) const {
    for (const auto& [id, h] : holders_) {
        if (const auto* t = std::get_if<tree>(&h.data))
            f(*t);
        else
            f(std::get<block>(h.data));
    }
}

template <class Family>
std::vector<holder_info> staged_collection<Family>::holders() const {
    std::vector<holder_info> out;
    for (const auto& [id, h] : holders_) {
        holder_info info;
        info.role = static_cast<holder_info::kind>(h.r);
        info.slot = h.slot;
        info.single = h.single;
        info.in_job = h.job >= 0;
        info.alive_symbols = holder_alive(h);
        info.deleted_symbols = holder_deleted(h);
        info.items = holder_count(h);
        info.m = sched_.m(id);
        if (h.r == role::level)
            for (std::size_t j = 0; j < level_.size(); ++j)
                if (level_[j] == id) info.slot = j;
        out.push_back(info);
    }
    return out;
}

template <class Family>
std::string staged_collection<Family>::validate() const {
    std::uint64_t alive = 0, items = 0;
    for (const auto& [id, h] : holders_) {
        alive += holder_alive(h);
        items += holder_count(h);
        if (h.r == role::temp && holder_count(h) > 1) return "temp holder with more than one item";
        if (h.job >= 0 && !jobs_.count(static_cast<std::uint64_t>(h.job))) return "holder tied to a finished job";
        if ((h.r == role::locked || h.r == role::temp || h.r == role::draining) && h.job < 0)
            return "frozen holder without a job";
    }
    if (alive != n_) return "holder sizes do not add up to the collection size";
    if (items != where_.size()) return "registry size differs from stored items";
    for (const auto& [id, hid] : where_) {
        auto it = holders_.find(hid);
        if (it == holders_.end()) return "registry points at a missing holder";
        const auto& h = it->second;
        const bool held = std::holds_alternative<tree>(h.data) ? Family::tree_contains(std::get<tree>(h.data), id)
                                                               : Family::block_contains(std::get<block>(h.data), id);
        if (!held) return "registered item missing from its holder";
    }
    if (level_.size() != layout_.caps.size()) return "level slots do not match the layout";
    for (std::size_t j = 0; j < level_.size(); ++j) {
        if (slot_size(j) > layout_.caps[j]) return "level " + std::to_string(j) + " exceeds its cap";
        if (level_[j] && job_for_slot(j)) return "level " + std::to_string(j) + " is both present and pending";
        if (j > 0 && level_[j] && 2 * holder_deleted(holders_.at(*level_[j])) >= layout_.caps[j])
            return "level " + std::to_string(j) + " holds too many deleted symbols";
    }
    if (!level_[0] || !std::holds_alternative<tree>(holders_.at(*level_[0]).data)) return "missing dynamic level";
    std::size_t top_merges = 0;
    std::map<std::size_t, int> per_slot;
    for (const auto& [id, jb] : jobs_) {
        if (jb.what == job_kind::top_merge) ++top_merges;
        if (jb.target != tops_slot && ++per_slot[jb.target] > 1) return "two pending builds for one level";
        if (jb.fed > jb.total) return "job fed past its input";
    }
    if (top_merges > 1) return "two pending top merges";
    for (const auto t : tops_) {
        const auto& h = holders_.at(t);
        if (h.r != role::top) return "top list holds a non-top";
        if (!h.single && h.job < 0 && holder_alive(h) * tau_ > 4 * nf_ + tau_ * layout_.caps.back())
            return "multi-item top above its size bound";
    }
    return {};
}

// ----------------------------------------------------------- snapshots

template <class Family>
void staged_collection<Family>::save(std::ostream& out) {
    settle();
    io::put<double>(out, opts_.epsilon);
    io::put<std::uint32_t>(out, tau_);
    io::put<std::uint64_t>(out, opts_.seed);
    io::put<std::uint64_t>(out, nf_);
    io::put<std::uint64_t>(out, holders_.size());
    for (const auto& [id, h] : holders_) {
        io::put<std::uint8_t>(out, static_cast<std::uint8_t>(h.r));
        std::uint64_t slot = h.slot;
        for (std::size_t j = 0; j < level_.size(); ++j)
            if (level_[j] == id) slot = j;
        io::put<std::uint64_t>(out, slot);
        io::put<std::uint8_t>(out, h.single ? 1 : 0);
        io::put<std::uint64_t>(out, sched_.m(id));
        Family::save_items(out, holder_items(h));
    }
}

template <class Family>
staged_collection<Family> staged_collection<Family>::load(std::istream& in, config cfg) {
    staged_options o;
    o.epsilon = io::get<double>(in);
    o.tau = io::get<std::uint32_t>(in);
    o.seed = io::get<std::uint64_t>(in);
    const auto nf = io::get<std::uint64_t>(in);
    if (o.tau < 2 || !(o.epsilon > 0 && o.epsilon <= 2) || nf < staged_detail::min_nf)
        throw io::format_error("invalid staged parameters");
    staged_collection c(o, std::move(cfg));
    c.nf_ = nf;
    c.refresh_parameters();
    const auto count = io::get<std::uint64_t>(in);
    for (std::uint64_t k = 0; k < count; ++k) {
        const auto r = static_cast<role>(io::get<std::uint8_t>(in));
        const auto slot = io::get<std::uint64_t>(in);
        const bool single = io::get<std::uint8_t>(in) != 0;
        const auto m = io::get<std::uint64_t>(in);
        auto items = Family::load_items(in);
        for (const auto& x : items) {
            if (c.where_.count(x.first)) throw io::format_error("item stored twice in snapshot");
            c.n_ += Family::size(x.second);
        }
        if (r == role::tree) {
            auto& t = std::get<tree>(c.holders_.at(*c.level_[0]).data);
            for (auto& x : items) {
                Family::tree_insert(t, x.first, x.second);
                c.where_[x.first] = *c.level_[0];
            }
        } else if (r == role::level) {
            if (slot == 0 || slot >= c.level_.size() || c.level_[slot]) throw io::format_error("bad level slot in snapshot");
            c.level_[slot] = c.build_block(std::move(items), role::level, slot, false);
        } else if (r == role::top) {
            if (auto id = c.build_block(std::move(items), role::top, 0, single)) c.sched_.add_top(*id, m);
        } else if (r == role::locked_top) {
            c.locked_top_ = c.build_block(std::move(items), role::locked_top, 0, false);
        } else {
            throw io::format_error("snapshot holds a holder in transit");
        }
    }
    return c;
}

}  // namespace dyndex
