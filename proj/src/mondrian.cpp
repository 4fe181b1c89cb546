#include "amf/mondrian.hpp"

#include <cmath>
#include <stdexcept>

namespace amf {
namespace {

bool has_point(const NodeRecord& rec) { return rec.range_low[0] <= rec.range_high[0]; }

// Index with probability lengths[j] / total. Requires total > 0.
int sample_dim(std::span<const double> lengths, double total, RngStream& rng) {
    const double u = rng.uniform_open01() * total;
    double cum = 0.0;
    int last_positive = -1;
    for (std::size_t j = 0; j < lengths.size(); ++j) {
        if (lengths[j] <= 0.0) continue;
        last_positive = static_cast<int>(j);
        cum += lengths[j];
        if (u < cum) return last_positive;
    }
    return last_positive;  // rounding spill lands on the last usable dimension
}

// Per-dimension extension of x beyond the node's range box.
double extension_mass(const NodeRecord& rec, std::span<const double> x,
                      std::vector<double>& per_dim) {
    per_dim.resize(x.size());
    double total = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        double d = 0.0;
        if (x[j] < rec.range_low[j]) d = rec.range_low[j] - x[j];
        else if (x[j] > rec.range_high[j]) d = x[j] - rec.range_high[j];
        per_dim[j] = d;
        total += d;
    }
    return total;
}

void check_dim(const MondrianTree& tree, std::span<const double> x, const char* who) {
    if (x.size() != static_cast<std::size_t>(tree.dim()))
        throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

}  // namespace

double CellBox::linear_dim() const {
    double s = 0.0;
    for (std::size_t j = 0; j < low.size(); ++j) s += high[j] - low[j];
    return s;
}

MondrianTree sample_mondrian_pruned(const CellBox& box, double lambda, RngStream& rng) {
    if (box.low.empty() || box.low.size() != box.high.size())
        throw std::invalid_argument("sample_mondrian_pruned: malformed box");
    for (std::size_t j = 0; j < box.low.size(); ++j)
        if (!(box.low[j] <= box.high[j]))
            throw std::invalid_argument("sample_mondrian_pruned: box side with negative length");
    if (!(lambda > 0.0)) throw std::invalid_argument("sample_mondrian_pruned: lambda must be positive");

    MondrianTree tree(static_cast<int>(box.low.size()), Task::regression);
    tree.node(tree.root()).range_low = box.low;
    tree.node(tree.root()).range_high = box.high;

    // Depth-first; each pending entry is a leaf cell awaiting its clock.
    std::vector<std::pair<NodeId, CellBox>> stack;
    stack.push_back({tree.root(), box});
    std::vector<double> lengths;
    while (!stack.empty()) {
        auto [id, cell] = std::move(stack.back());
        stack.pop_back();
        const double birth = tree.node(id).birth_time;
        const double clock = rng.exponential(cell.linear_dim());
        if (birth + clock > lambda) continue;  // time pruning: stays a leaf

        lengths.resize(cell.low.size());
        for (std::size_t j = 0; j < cell.low.size(); ++j) lengths[j] = cell.high[j] - cell.low[j];
        const int j = sample_dim(lengths, cell.linear_dim(), rng);
        const double s = rng.uniform(cell.low[static_cast<std::size_t>(j)],
                                     cell.high[static_cast<std::size_t>(j)]);
        const auto [internal, fresh] = tree.insert_internal_above(id, j, s, birth + clock,
                                                                  Side::left);
        CellBox left = cell, right = cell;
        left.high[static_cast<std::size_t>(j)] = s;
        right.low[static_cast<std::size_t>(j)] = s;
        tree.node(fresh).range_low = left.low;
        tree.node(fresh).range_high = left.high;
        tree.node(id).range_low = right.low;
        tree.node(id).range_high = right.high;
        stack.push_back({id, std::move(right)});
        stack.push_back({fresh, std::move(left)});
    }
    return tree;
}

NodeId extend_unrestricted(MondrianTree& tree, std::span<const double> x, RngStream& rng) {
    check_dim(tree, x, "extend_unrestricted");
    for (double v : x)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("extend_unrestricted: point outside the unit cube");

    // Walk to the leaf, tracking its cell within [0,1]^d.
    CellBox cell{std::vector<double>(x.size(), 0.0), std::vector<double>(x.size(), 1.0)};
    NodeId id = tree.root();
    while (!tree.node(id).is_leaf()) {
        tree.extend_range(id, x);
        const NodeRecord& rec = tree.node(id);
        const auto j = static_cast<std::size_t>(rec.split_dim);
        if (x[j] <= rec.split_threshold) {
            cell.high[j] = rec.split_threshold;
            id = rec.left;
        } else {
            cell.low[j] = rec.split_threshold;
            id = rec.right;
        }
    }
    if (!has_point(tree.node(id))) {
        tree.extend_range(id, x);
        return id;
    }
    const std::vector<double> stored = tree.node(id).range_low;  // leaf boxes are points
    bool duplicate = true;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (x[j] != stored[j]) { duplicate = false; break; }
    if (duplicate) return id;

    // Split the full cell until x and the stored point part ways. Cells that
    // keep both inherit the leaf's state; empty siblings start fresh.
    std::vector<double> lengths(x.size());
    while (true) {
        const double birth = tree.node(id).birth_time;
        const double clock = rng.exponential(cell.linear_dim());
        for (std::size_t j = 0; j < x.size(); ++j) lengths[j] = cell.high[j] - cell.low[j];
        const int jd = sample_dim(lengths, cell.linear_dim(), rng);
        const auto j = static_cast<std::size_t>(jd);
        const double s = rng.uniform(cell.low[j], cell.high[j]);
        const bool x_left = x[j] <= s;
        const bool stored_left = stored[j] <= s;
        if (x_left == stored_left) {
            const Side empty_side = x_left ? Side::right : Side::left;
            const auto [internal, fresh] = tree.insert_internal_above(id, jd, s, birth + clock,
                                                                      empty_side);
            (void)fresh;
            tree.extend_range(internal, x);
            if (x_left) cell.high[j] = s; else cell.low[j] = s;
        } else {
            const Side x_side = x_left ? Side::left : Side::right;
            const auto [internal, fresh] = tree.insert_internal_above(id, jd, s, birth + clock,
                                                                      x_side);
            tree.extend_range(internal, x);
            tree.extend_range(fresh, x);
            return fresh;
        }
    }
}

std::size_t sample_virtual_chain_unrestricted(const MondrianTree& tree,
                                              std::span<const double> x, RngStream& rng) {
    check_dim(tree, x, "sample_virtual_chain_unrestricted");
    CellBox cell{std::vector<double>(x.size(), 0.0), std::vector<double>(x.size(), 1.0)};
    NodeId id = tree.root();
    while (!tree.node(id).is_leaf()) {
        const NodeRecord& rec = tree.node(id);
        const auto j = static_cast<std::size_t>(rec.split_dim);
        if (x[j] <= rec.split_threshold) {
            cell.high[j] = rec.split_threshold;
            id = rec.left;
        } else {
            cell.low[j] = rec.split_threshold;
            id = rec.right;
        }
    }
    if (!has_point(tree.node(id))) return 0;
    const std::vector<double>& stored = tree.node(id).range_low;
    bool duplicate = true;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (x[j] != stored[j]) { duplicate = false; break; }
    if (duplicate) return 0;

    std::vector<double> lengths(x.size());
    std::size_t splits = 0;
    while (true) {
        (void)rng.exponential(cell.linear_dim());  // birth clock, parity with the real update
        for (std::size_t j = 0; j < x.size(); ++j) lengths[j] = cell.high[j] - cell.low[j];
        const int jd = sample_dim(lengths, cell.linear_dim(), rng);
        const auto j = static_cast<std::size_t>(jd);
        const double s = rng.uniform(cell.low[j], cell.high[j]);
        ++splits;
        const bool x_left = x[j] <= s;
        if (x_left != (stored[j] <= s)) return splits;
        if (x_left) cell.high[j] = s; else cell.low[j] = s;
    }
}

namespace {

bool pure_on_label(const NodeRecord& rec, int label) {
    if (rec.stats.count == 0 || rec.stats.class_counts.empty()) return false;
    const auto idx = static_cast<std::size_t>(label);
    return idx < rec.stats.class_counts.size() &&
           rec.stats.class_counts[idx] == rec.stats.count;
}

}  // namespace

RestrictedUpdate restricted_update(MondrianTree& tree, std::span<const double> x,
                                   RngStream& rng, int suppress_pure_label) {
    check_dim(tree, x, "restricted_update");
    NodeId id = tree.root();
    if (!has_point(tree.node(id))) {  // very first point: the root just records it
        tree.extend_range(id, x);
        return {id, 0};
    }
    std::vector<double> per_dim;
    while (true) {
        const NodeRecord& rec = tree.node(id);
        const double mass = extension_mass(rec, x, per_dim);
        const double clock = rng.exponential(mass);  // +inf when x is inside the box
        const double child_birth = rec.is_leaf() ? std::numeric_limits<double>::infinity()
                                                 : tree.node(rec.left).birth_time;
        bool split_now = std::isfinite(clock) &&
                         (rec.is_leaf() || rec.birth_time + clock < child_birth);
        if (split_now && suppress_pure_label >= 0 && pure_on_label(rec, suppress_pure_label))
            split_now = false;
        if (split_now) {
            const int jd = sample_dim(per_dim, mass, rng);
            const auto j = static_cast<std::size_t>(jd);
            Side side;
            double threshold;
            if (x[j] < rec.range_low[j]) {
                side = Side::left;  // x extends below: new leaf takes the low side
                threshold = rng.uniform(x[j], rec.range_low[j]);
            } else {
                side = Side::right;
                threshold = rng.uniform(rec.range_high[j], x[j]);
            }
            const auto [internal, leaf] = tree.insert_internal_above(
                id, jd, threshold, rec.birth_time + clock, side);
            tree.extend_range(internal, x);
            tree.extend_range(leaf, x);
            return {leaf, 2};
        }
        tree.extend_range(id, x);
        const NodeRecord& cur = tree.node(id);
        if (cur.is_leaf()) return {id, 0};  // duplicate point or suppressed split
        id = (x[static_cast<std::size_t>(cur.split_dim)] <= cur.split_threshold) ? cur.left
                                                                                 : cur.right;
    }
}

std::optional<VirtualSplit> sample_virtual_split(const MondrianTree& tree,
                                                 std::span<const double> x, RngStream& rng) {
    check_dim(tree, x, "sample_virtual_split");
    NodeId id = tree.root();
    if (!has_point(tree.node(id))) return std::nullopt;
    std::vector<double> per_dim;
    while (true) {
        const NodeRecord& rec = tree.node(id);
        const double mass = extension_mass(rec, x, per_dim);
        const double clock = rng.exponential(mass);
        const double child_birth = rec.is_leaf() ? std::numeric_limits<double>::infinity()
                                                 : tree.node(rec.left).birth_time;
        if (std::isfinite(clock) && (rec.is_leaf() || rec.birth_time + clock < child_birth)) {
            const int jd = sample_dim(per_dim, mass, rng);
            const auto j = static_cast<std::size_t>(jd);
            VirtualSplit vs;
            vs.host = id;
            vs.birth = rec.birth_time + clock;
            vs.split_dim = jd;
            if (x[j] < rec.range_low[j]) {
                vs.side = Side::left;
                vs.threshold = rng.uniform(x[j], rec.range_low[j]);
            } else {
                vs.side = Side::right;
                vs.threshold = rng.uniform(rec.range_high[j], x[j]);
            }
            return vs;
        }
        if (rec.is_leaf()) return std::nullopt;
        id = (x[static_cast<std::size_t>(rec.split_dim)] <= rec.split_threshold) ? rec.left
                                                                                 : rec.right;
    }
}

}  // namespace amf
