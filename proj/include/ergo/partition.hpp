#pragma once

// The partition lattice over finite cylinder algebras: join, meet (mod zero
// and set-theoretic), refinement order, the partition <-> algebra
// correspondence, dynamical refinements (past / full / tail), the exact
// invariant hull, and the separating-family test.

#include "measure.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace ergo {

class Partition {
public:
    static Partition make(SystemPtr sys, std::vector<std::pair<std::string, CylinderSet>> elements) {
        Partition p;
        p.sys_ = std::move(sys);
        if (elements.empty()) throw error("Partition: no elements");
        for (auto& [label, cyl] : elements) {
            require_same_system(p.sys_, cyl.system());
            CylinderSet n = cyl.normalized();
            if (n.is_empty()) throw error("Partition: element '" + label + "' is empty");
            p.elements_.emplace_back(label, std::move(n));
        }
        p.compute_window();
        p.validate();
        return p;
    }

    static Partition trivial(SystemPtr sys) {
        Partition p;
        p.sys_ = sys;
        p.elements_.emplace_back("X", CylinderSet::full(std::move(sys)));
        p.win_start_ = 0;
        p.win_len_ = 0;
        return p;
    }

    // The depth-approximate point partition on a window: one element per
    // admissible cell.
    static Partition point_cells(SystemPtr sys, int start, int len) {
        if (len == 0) return trivial(std::move(sys));
        Partition p;
        p.sys_ = sys;
        for (const Cell& w : sys->admissible_cells(start, len))
            p.elements_.emplace_back(cell_label(sys, w), CylinderSet::cylinder(sys, start, w));
        p.win_start_ = start;
        p.win_len_ = len;
        return p;
    }

    static Partition symbol_cells(SystemPtr sys) { return point_cells(std::move(sys), 0, 1); }

    const SystemPtr& system() const { return sys_; }
    int size() const { return static_cast<int>(elements_.size()); }
    const CylinderSet& element(int i) const { return elements_.at(i).second; }
    const std::string& label(int i) const { return elements_.at(i).first; }
    const std::vector<std::pair<std::string, CylinderSet>>& elements() const { return elements_; }
    std::pair<int, int> window() const { return {win_start_, win_len_}; }
    bool is_trivial() const { return elements_.size() == 1; }

    // Index of the element containing `cell`, or -1.
    int element_containing(const CylinderSet& cell) const {
        for (int i = 0; i < size(); ++i)
            if (elements_[i].second.contains(cell)) return i;
        return -1;
    }

    // Maps every admissible cell of the given window (which must contain the
    // partition window) to its element index.
    std::map<Cell, int> cell_assignment(int start, int len) const {
        std::map<Cell, int> out;
        for (int i = 0; i < size(); ++i) {
            CylinderSet w = elements_[i].second.widened(start, len);
            for (const Cell& c : w.cells()) out[c] = i;
        }
        return out;
    }

    friend bool operator==(const Partition& a, const Partition& b) {
        require_same_system(a.sys_, b.sys_);
        if (a.size() != b.size()) return false;
        int lo = std::min(a.win_start_, b.win_start_);
        int hi = std::max(a.win_start_ + a.win_len_, b.win_start_ + b.win_len_);
        if (hi < lo) { lo = 0; hi = 0; }
        auto ma = a.cell_assignment(lo, hi - lo);
        auto mb = b.cell_assignment(lo, hi - lo);
        // equal iff the two cell groupings coincide
        std::map<int, int> pairing;
        for (const auto& [cell, ia] : ma) {
            int ib = mb.at(cell);
            auto it = pairing.find(ia);
            if (it == pairing.end()) pairing.emplace(ia, ib);
            else if (it->second != ib) return false;
        }
        std::vector<int> seen(b.size(), 0);
        for (auto& [ia, ib] : pairing) {
            if (seen[ib]++) return false;
        }
        return true;
    }
    friend bool operator!=(const Partition& a, const Partition& b) { return !(a == b); }

private:
    Partition() = default;

    void compute_window() {
        win_start_ = 0;
        win_len_ = 0;
        bool any = false;
        int lo = 0, hi = 0;
        for (auto& [label, c] : elements_) {
            if (c.len() == 0) continue;
            if (!any) { lo = c.start(); hi = c.end(); any = true; }
            else { lo = std::min(lo, c.start()); hi = std::max(hi, c.end()); }
        }
        if (any) { win_start_ = lo; win_len_ = hi - lo; }
    }

    void validate() const {
        auto all = sys_->admissible_cells(win_start_, win_len_);
        std::map<Cell, int> count;
        for (const Cell& c : all) count[c] = 0;
        for (const auto& [label, elem] : elements_) {
            CylinderSet w = elem.widened(win_start_, win_len_);
            for (const Cell& c : w.cells()) {
                auto it = count.find(c);
                if (it == count.end()) throw error("Partition: inadmissible cell in element");
                ++it->second;
            }
        }
        for (const auto& [c, n] : count) {
            if (n == 0)
                throw error("Partition: elements do not cover the space (missing cell " +
                            cell_label(sys_, c) + ")");
            if (n > 1)
                throw error("Partition: elements overlap on cell " + cell_label(sys_, c));
        }
    }

    SystemPtr sys_;
    std::vector<std::pair<std::string, CylinderSet>> elements_;
    int win_start_ = 0, win_len_ = 0;
};

// Coarsest common refinement: all non-empty intersections C cap D.
inline Partition join(const Partition& xi, const Partition& eta) {
    require_same_system(xi.system(), eta.system());
    const SystemPtr& sys = xi.system();
    int lo = std::min(xi.window().first, eta.window().first);
    int hi = std::max(xi.window().first + xi.window().second,
                      eta.window().first + eta.window().second);
    if (hi < lo) { lo = 0; hi = 0; }
    auto ma = xi.cell_assignment(lo, hi - lo);
    auto mb = eta.cell_assignment(lo, hi - lo);
    std::map<std::pair<int, int>, std::set<Cell>> buckets;
    for (const auto& [cell, ia] : ma) buckets[{ia, mb.at(cell)}].insert(cell);
    std::vector<std::pair<std::string, CylinderSet>> elems;
    for (auto& [key, cells] : buckets) {
        std::string label = xi.is_trivial() ? eta.label(key.second)
                          : eta.is_trivial() ? xi.label(key.first)
                          : xi.label(key.first) + "." + eta.label(key.second);
        elems.emplace_back(label, CylinderSet(sys, lo, hi - lo, std::move(cells)));
    }
    return Partition::make(sys, std::move(elems));
}

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Shared meet machinery: components of the bipartite overlap graph, with the
// overlap relation supplied by the caller. Output elements are unions of
// xi-members so that null cells deterministically follow their xi-element.
template <typename Overlaps>
Partition meet_impl(const Partition& xi, const Partition& eta, Overlaps overlaps) {
    require_same_system(xi.system(), eta.system());
    const SystemPtr& sys = xi.system();
    const int nx = xi.size(), ny = eta.size();
    UnionFind uf(nx + ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            if (overlaps(xi.element(i), eta.element(j))) uf.unite(i, nx + j);
    std::map<int, std::vector<int>> groups; // root -> xi members, ordered
    for (int i = 0; i < nx; ++i) groups[uf.find(i)].push_back(i);
    std::vector<std::pair<std::string, CylinderSet>> elems;
    std::vector<std::pair<int, std::vector<int>>> ordered;
    for (auto& [root, members] : groups) ordered.emplace_back(members.front(), members);
    std::sort(ordered.begin(), ordered.end());
    for (auto& [first, members] : ordered) {
        CylinderSet u = xi.element(members.front());
        std::string label = xi.label(members.front());
        for (std::size_t k = 1; k < members.size(); ++k) {
            u = unite(u, xi.element(members[k]));
            label += "+" + xi.label(members[k]);
        }
        elems.emplace_back(label, u);
    }
    return Partition::make(sys, std::move(elems));
}

} // namespace detail

// Finest common coarsening mod mu-zero: connected components of the overlap
// graph with edges where mu(C cap D) > 0.
inline Partition meet(const Partition& xi, const Partition& eta, const Measure& mu) {
    return detail::meet_impl(xi, eta, [&](const CylinderSet& c, const CylinderSet& d) {
        return mu(intersect(c, d)).sign() > 0;
    });
}

// Set-theoretic variant: edges on syntactically non-empty intersections.
inline Partition meet_settheoretic(const Partition& xi, const Partition& eta) {
    return detail::meet_impl(xi, eta, [](const CylinderSet& c, const CylinderSet& d) {
        return !intersect(c, d).is_empty();
    });
}

// true iff every element of xi lies inside a single element of eta.
inline bool refines(const Partition& xi, const Partition& eta) {
    require_same_system(xi.system(), eta.system());
    int lo = std::min(xi.window().first, eta.window().first);
    int hi = std::max(xi.window().first + xi.window().second,
                      eta.window().first + eta.window().second);
    if (hi < lo) { lo = 0; hi = 0; }
    auto ma = xi.cell_assignment(lo, hi - lo);
    auto mb = eta.cell_assignment(lo, hi - lo);
    std::map<int, int> target;
    for (const auto& [cell, ia] : ma) {
        int ib = mb.at(cell);
        auto it = target.find(ia);
        if (it == target.end()) target.emplace(ia, ib);
        else if (it->second != ib) return false;
    }
    return true;
}

// The d_mu pseudo-metric: mu of the symmetric difference.
inline Scalar measure_distance(const CylinderSet& a, const CylinderSet& b, const Measure& mu) {
    return mu(sym_diff(a, b));
}

// Finite algebra represented by its atom partition: members are exactly the
// unions of atoms.
class SetAlgebra {
public:
    explicit SetAlgebra(Partition atoms) : atoms_(std::move(atoms)) {}

    const Partition& atoms() const { return atoms_; }

    // 2^(number of atoms); guarded, only meaningful at desk scale.
    unsigned long long member_count() const {
        if (atoms_.size() >= 63) throw error("SetAlgebra: too many atoms to count members");
        return 1ull << atoms_.size();
    }

    bool contains(const CylinderSet& set) const {
        CylinderSet residue = set.normalized();
        for (int i = 0; i < atoms_.size(); ++i) {
            CylinderSet overlap = intersect(residue, atoms_.element(i));
            if (overlap.is_empty()) continue;
            if (!(overlap == atoms_.element(i))) return false; // atom split
        }
        return true;
    }

    // Enumerates all members (small algebras only), deterministic order.
    std::vector<CylinderSet> members() const {
        unsigned long long n = member_count();
        std::vector<CylinderSet> out;
        for (unsigned long long mask = 0; mask < n; ++mask) {
            CylinderSet u = CylinderSet::empty_set(atoms_.system());
            for (int i = 0; i < atoms_.size(); ++i)
                if (mask >> i & 1) u = unite(u, atoms_.element(i));
            out.push_back(u);
        }
        return out;
    }

private:
    Partition atoms_;
};

inline SetAlgebra algebra_of(const Partition& xi) { return SetAlgebra(xi); }
inline const Partition& atoms_of(const SetAlgebra& alg) { return alg.atoms(); }

// The algebra generated by a list of sets: atoms are the non-empty
// intersections over all in/out sign patterns, labelled by the pattern word
// (0 = inside the generator, following the lexicographic convention of the
// interval construction).
inline SetAlgebra generated_algebra(const SystemPtr& sys, const std::vector<CylinderSet>& gens) {
    std::vector<std::pair<std::string, CylinderSet>> atoms;
    atoms.emplace_back("", CylinderSet::full(sys));
    for (const CylinderSet& g : gens) {
        require_same_system(sys, g.system());
        CylinderSet gc = g.complement();
        std::vector<std::pair<std::string, CylinderSet>> next;
        for (auto& [word, atom] : atoms) {
            CylinderSet in = intersect(atom, g);
            CylinderSet out = intersect(atom, gc);
            if (!in.is_empty()) next.emplace_back(word + "0", in);
            if (!out.is_empty()) next.emplace_back(word + "1", out);
        }
        atoms = std::move(next);
    }
    return SetAlgebra(Partition::make(sys, std::move(atoms)));
}

inline Partition preimage(const Partition& xi) {
    std::vector<std::pair<std::string, CylinderSet>> elems;
    for (const auto& [label, c] : xi.elements()) elems.emplace_back(label, preimage(c));
    return Partition::make(xi.system(), std::move(elems));
}

// T(xi): two-sided systems only (the shift is invertible there).
inline Partition image(const Partition& xi) {
    if (xi.system()->one_sided())
        throw error("image: forward shift of a partition needs a two-sided system");
    std::vector<std::pair<std::string, CylinderSet>> elems;
    for (const auto& [label, c] : xi.elements()) {
        CylinderSet shifted = c.len() == 0 ? c : CylinderSet(c.system(), c.start() - 1, c.len(), c.cells());
        elems.emplace_back(label, shifted);
    }
    return Partition::make(xi.system(), std::move(elems));
}

inline Partition past_refinement(const Partition& xi, int n) {
    Partition acc = xi;
    Partition shifted = xi;
    for (int k = 1; k <= n; ++k) {
        shifted = preimage(shifted);
        acc = join(acc, shifted);
    }
    return acc;
}

struct DynRefinements {
    Partition past; // join of T^{-k} xi, k = 0..n
    Partition full; // join of T^k xi, k = -n..n
    Partition tail; // T^{-n}(past)
};

inline DynRefinements dyn_refinements(const Partition& xi, int n) {
    if (n < 0) throw error("dyn_refinements: negative depth");
    if (xi.system()->one_sided() && n > 0)
        throw error("dyn_refinements: full trajectory refinement needs a two-sided system");
    Partition past = past_refinement(xi, n);
    Partition full = past;
    Partition forward = xi;
    for (int k = 1; k <= n; ++k) {
        forward = image(forward);
        full = join(full, forward);
    }
    Partition tail = past;
    for (int k = 0; k < n; ++k) tail = preimage(tail);
    return {std::move(past), std::move(full), std::move(tail)};
}

// Finest coarsening of xi into exactly T-invariant sets of positive measure.
//
// Two cells linked through an admissible word one coordinate longer than the
// window must agree on membership in any invariant union, and cells of one
// xi-element must stay together; the hull's groups are the components of
// that relation. For a symbol-respecting xi this degenerates to the weak
// components of the transition digraph (communicating classes merged along
// cross edges). Groups of measure zero are absorbed into the first positive
// group so that every returned element carries positive measure.
inline Partition invariant_hull(const Partition& xi, const Measure& mu) {
    require_same_system(xi.system(), mu.system());
    if (!mu.is_invariant()) throw error("invariant_hull: measure must be invariant");
    const SystemPtr& sys = xi.system();
    auto [a, len] = xi.window();
    if (len == 0) return xi; // trivial partition is invariant
    auto cells = sys->admissible_cells(a, len);
    std::map<Cell, int> id;
    for (const Cell& c : cells) id.emplace(c, static_cast<int>(id.size()));
    detail::UnionFind uf(static_cast<int>(cells.size()));

    auto assignment = xi.cell_assignment(a, len);
    std::map<int, int> first_cell_of_elem;
    for (const auto& [cell, e] : assignment) {
        auto it = first_cell_of_elem.find(e);
        if (it == first_cell_of_elem.end()) first_cell_of_elem.emplace(e, id.at(cell));
        else uf.unite(id.at(cell), it->second);
    }
    for (const Cell& w : sys->admissible_cells(a, len + 1))
        uf.unite(id.at(w.substr(0, len)), id.at(w.substr(1)));

    std::map<int, std::set<Cell>> groups;
    for (const Cell& c : cells) groups[uf.find(id.at(c))].insert(c);

    struct Group { CylinderSet set; Scalar mass; };
    std::vector<Group> positive;
    std::vector<CylinderSet> null_groups;
    for (auto& [root, cs] : groups) {
        CylinderSet u(sys, a, len, cs);
        Scalar m = mu(u);
        if (m.sign() > 0) positive.push_back({std::move(u), std::move(m)});
        else null_groups.push_back(std::move(u));
    }
    for (CylinderSet& ng : null_groups) positive.front().set = unite(positive.front().set, ng);

    std::vector<std::pair<std::string, CylinderSet>> elems;
    for (std::size_t i = 0; i < positive.size(); ++i)
        elems.emplace_back("I" + std::to_string(i), positive[i].set);
    return Partition::make(sys, std::move(elems));
}

// true iff every pair of positive-measure elements of xi is separated by
// some family member (one inside, the other in the complement, mod zero).
inline bool separating_test(const Partition& xi, const std::vector<CylinderSet>& family,
                            const Measure& mu) {
    std::vector<int> pos;
    for (int i = 0; i < xi.size(); ++i)
        if (mu(xi.element(i)).sign() > 0) pos.push_back(i);
    auto inside = [&](const CylinderSet& c, const CylinderSet& s) {
        return mu(subtract(c, s)).is_zero();
    };
    auto outside = [&](const CylinderSet& c, const CylinderSet& s) {
        return mu(intersect(c, s)).is_zero();
    };
    for (std::size_t i = 0; i < pos.size(); ++i) {
        for (std::size_t j = i + 1; j < pos.size(); ++j) {
            const CylinderSet& c1 = xi.element(pos[i]);
            const CylinderSet& c2 = xi.element(pos[j]);
            bool separated = false;
            for (const CylinderSet& s : family) {
                if ((inside(c1, s) && outside(c2, s)) || (inside(c2, s) && outside(c1, s))) {
                    separated = true;
                    break;
                }
            }
            if (!separated) return false;
        }
    }
    return true;
}

} // namespace ergo
