#pragma once

// Conditional measure systems on finite partitions: factor measure,
// per-element conditionals as depth tables, the disintegration identity,
// and the conditional information function.

#include "partition.hpp"

#include <cmath>

namespace ergo {

struct ConditionalSlice {
    std::string label;
    CylinderSet element;
    Scalar weight;       // mu_xi(C)
    Measure conditional; // mu_C as a table on the common window
};

struct ConditionalSystem {
    std::vector<ConditionalSlice> slices; // positive-weight elements only
    std::vector<std::string> dropped;     // labels of mu-null elements
    int window_start = 0, window_len = 0; // the depth algebra the tables live on
};

// Factor weights and per-element conditional tables over the algebra spanned
// by xi's window together with [0, depth).
inline ConditionalSystem disintegrate(const Measure& mu, const Partition& xi, int depth) {
    require_same_system(mu.system(), xi.system());
    if (depth < 0) throw error("disintegrate: negative depth");
    const SystemPtr& sys = mu.system();
    auto [xs, xl] = xi.window();
    int lo = xl == 0 ? 0 : std::min(xs, 0);
    int hi = std::max(xl == 0 ? 0 : xs + xl, depth);
    if (sys->one_sided()) lo = std::max(lo, 0);

    ConditionalSystem out;
    out.window_start = lo;
    out.window_len = hi - lo;
    for (int i = 0; i < xi.size(); ++i) {
        Scalar w = mu(xi.element(i));
        if (w.is_zero()) {
            out.dropped.push_back(xi.label(i));
            continue;
        }
        std::map<Cell, Scalar> table;
        CylinderSet wide = xi.element(i).widened(lo, hi - lo);
        for (const Cell& c : wide.cells()) {
            Scalar m = mu(CylinderSet::cylinder(sys, lo, c));
            if (!m.is_zero()) table.emplace(c, m / w);
        }
        out.slices.push_back({xi.label(i), xi.element(i), w,
                              Measure::table(sys, lo, hi - lo, std::move(table))});
    }
    if (out.slices.empty()) throw error("disintegrate: measure vanishes on every element");
    return out;
}

// Both sides of the disintegration identity for a simple function given as
// weighted indicators of cylinder sets inside the depth algebra.
inline std::pair<Scalar, Scalar> fubini_check(const Measure& mu, const Partition& xi, int depth,
                                              const std::vector<std::pair<CylinderSet, Scalar>>& f) {
    ConditionalSystem cs = disintegrate(mu, xi, depth);
    Scalar lhs = Scalar::zero(mu.mode());
    for (const auto& [set, w] : f) {
        if (set.normalized().len() != 0 &&
            (set.normalized().start() < cs.window_start ||
             set.normalized().start() + set.normalized().len() > cs.window_start + cs.window_len))
            throw error("fubini_check: indicator outside the depth algebra");
        lhs += w * mu(set);
    }
    Scalar rhs = Scalar::zero(mu.mode());
    for (const ConditionalSlice& slice : cs.slices) {
        Scalar inner = Scalar::zero(mu.mode());
        for (const auto& [set, w] : f) inner += w * slice.conditional(intersect(set, slice.element));
        rhs += slice.weight * inner;
    }
    return {lhs, rhs};
}

struct ConditionalInformation {
    Scalar ratio; // mu_{eta(cell)}(xi(cell)), exact in rational mode
    double nats;  // -log ratio
};

// I(xi | eta) evaluated at one cell: -log of the conditional measure of the
// enclosing xi-element within the enclosing eta-element.
inline ConditionalInformation conditional_information(const Measure& mu, const Partition& xi,
                                                      const Partition& eta, const CylinderSet& cell) {
    int i = xi.element_containing(cell);
    int j = eta.element_containing(cell);
    if (i < 0) throw error("conditional_information: cell not inside a single xi-element");
    if (j < 0) throw error("conditional_information: cell not inside a single eta-element");
    Scalar denom = mu(eta.element(j));
    if (denom.is_zero()) throw error("conditional_information: enclosing eta-element is null");
    Scalar ratio = mu(intersect(xi.element(i), eta.element(j))) / denom;
    return {ratio, -std::log(ratio.value())};
}

} // namespace ergo
