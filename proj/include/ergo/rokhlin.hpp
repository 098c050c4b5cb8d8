#pragma once

// Constructive isomorphisms onto the unit interval and square.
//
// A family of generator sets A_1..A_n splits the space into up to 2^n cells
// A_w indexed by words w over {0,1} (digit 0 = inside the generator). The
// interval map sends A_w, in lexicographic order, to the half-open interval
// whose length is mu(A_w); zero-measure cells receive empty intervals. The
// square chart adds a vertical coordinate built from conditional measures of
// fiber cells within each column.

#include "measure.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ergo {

inline constexpr int kMaxGenerators = 16;

namespace detail {

// Classifies the admissible cells of the generators' common window by their
// in/out code word and accumulates exact cell masses for every prefix.
class GeneratorTree {
public:
    GeneratorTree(const Measure& mu, const std::vector<CylinderSet>& gens,
                  const CylinderSet* base = nullptr)
        : n_(static_cast<int>(gens.size())), mode_(mu.mode()) {
        if (n_ > kMaxGenerators) throw error("generator family too large");
        const SystemPtr& sys = mu.system();
        int lo = 0, hi = 0;
        bool any = false;
        auto absorb = [&](const CylinderSet& c) {
            CylinderSet nc = c.normalized();
            if (nc.len() == 0) return;
            if (!any) { lo = nc.start(); hi = nc.end(); any = true; }
            else { lo = std::min(lo, nc.start()); hi = std::max(hi, nc.end()); }
        };
        for (const CylinderSet& g : gens) absorb(g);
        if (base) absorb(*base);
        start_ = any ? lo : 0;
        len_ = any ? hi - lo : 0;

        std::vector<std::set<Cell>> member(n_);
        for (int k = 0; k < n_; ++k) member[k] = gens[k].widened(start_, len_).cells();
        std::set<Cell> base_cells;
        if (base) base_cells = base->widened(start_, len_).cells();

        for (const Cell& cell : sys->admissible_cells(start_, len_)) {
            if (base && !base_cells.count(cell)) continue;
            std::string w;
            w.reserve(n_);
            for (int k = 0; k < n_; ++k) w.push_back(member[k].count(cell) ? '0' : '1');
            Leaf& leaf = leaves_[w];
            leaf.mass = leaf.cells == 0 ? mu(CylinderSet::cylinder(sys, start_, cell))
                                        : leaf.mass + mu(CylinderSet::cylinder(sys, start_, cell));
            leaf.cells += 1;
        }
        // cumulative masses for every prefix, bottom-up (sparse: zero absent)
        for (const auto& [w, leaf] : leaves_)
            if (!leaf.mass.is_zero()) prefix_mass_[w] = leaf.mass;
        for (int len = n_; len > 0; --len) {
            std::map<std::string, Scalar> up;
            for (const auto& [w, m] : prefix_mass_) {
                if (static_cast<int>(w.size()) != len) continue;
                std::string parent = w.substr(0, len - 1);
                auto it = up.find(parent);
                if (it == up.end()) up.emplace(parent, m); else it->second += m;
            }
            prefix_mass_.merge(up);
        }
    }

    int generators() const { return n_; }
    int window_start() const { return start_; }
    int window_len() const { return len_; }

    // mu(A_w and base) for any word length <= n.
    Scalar mass(const std::string& prefix) const {
        auto it = prefix_mass_.find(prefix);
        return it == prefix_mass_.end() ? Scalar::zero(mode_) : it->second;
    }

    std::size_t cell_count(const std::string& word) const {
        auto it = leaves_.find(word);
        return it == leaves_.end() ? 0 : it->second.cells;
    }

    // The cells carried by all leaves under `prefix`, as one set.
    CylinderSet set_of(const SystemPtr& sys, const std::vector<CylinderSet>& gens,
                       const std::string& prefix) const {
        CylinderSet acc = CylinderSet::full(sys);
        for (std::size_t k = 0; k < prefix.size(); ++k)
            acc = intersect(acc, prefix[k] == '0' ? gens[k] : gens[k].complement());
        return acc;
    }

private:
    struct Leaf {
        Scalar mass;
        std::size_t cells = 0;
    };
    int n_;
    ScalarMode mode_;
    int start_ = 0, len_ = 0;
    std::map<std::string, Leaf> leaves_;
    std::map<std::string, Scalar> prefix_mass_;
};

inline std::string next_word(std::string w) {
    // lexicographic successor among fixed-length binary words
    int i = static_cast<int>(w.size()) - 1;
    while (i >= 0 && w[i] == '1') w[i--] = '0';
    if (i >= 0) w[i] = '1';
    return w;
}

} // namespace detail

struct IntervalEntry {
    std::string word;
    Scalar lo, hi; // half-open [lo, hi); lo == hi for zero-measure cells
};

struct IntervalMap {
    std::vector<IntervalEntry> entries; // lexicographic word order

    const IntervalEntry& at(const std::string& word) const {
        for (const auto& e : entries)
            if (e.word == word) return e;
        throw error("IntervalMap: unknown word " + word);
    }
    Scalar total() const {
        return entries.empty() ? Scalar::rational(0) : entries.back().hi;
    }
};

// The interval isomorphism on the algebra generated by A_1..A_n: every word
// w receives [sum_{v<w} mu(A_v), sum_{v<=w} mu(A_v)).
inline IntervalMap interval_map(const Measure& mu, const std::vector<CylinderSet>& gens) {
    detail::GeneratorTree tree(mu, gens);
    const int n = tree.generators();
    IntervalMap out;
    Scalar cursor = Scalar::zero(mu.mode());
    std::string w(n, '0');
    const std::size_t count = 1ull << n;
    for (std::size_t i = 0; i < count; ++i) {
        Scalar m = tree.mass(w);
        out.entries.push_back({w, cursor, cursor + m});
        cursor += m;
        w = detail::next_word(std::move(w));
    }
    return out;
}

// The reduced predecessor sum sum_{k : w_k = 1} mu(A_{w_1..w_{k-1} 0}),
// which equals the plain sum of mu(A_v) over all lexicographic predecessors
// v of w.
inline Scalar lex_offset(const Measure& mu, const std::vector<CylinderSet>& gens,
                         const std::string& word) {
    detail::GeneratorTree tree(mu, gens);
    if (static_cast<int>(word.size()) > tree.generators())
        throw error("lex_offset: word longer than the generator family");
    Scalar sum = Scalar::zero(mu.mode());
    for (std::size_t k = 0; k < word.size(); ++k) {
        if (word[k] != '0' && word[k] != '1') throw error("lex_offset: word must be binary");
        if (word[k] == '1') sum += tree.mass(word.substr(0, k) + "0");
    }
    return sum;
}

// Reduced predecessor sums for every word of the family at once, in
// lexicographic order, sharing one classification pass.
inline std::vector<std::pair<std::string, Scalar>> lex_offsets(const Measure& mu,
                                                               const std::vector<CylinderSet>& gens) {
    detail::GeneratorTree tree(mu, gens);
    const int n = tree.generators();
    std::vector<std::pair<std::string, Scalar>> out;
    std::string w(static_cast<std::size_t>(n), '0');
    for (std::size_t i = 0; i < (1ull << n); ++i) {
        Scalar sum = Scalar::zero(mu.mode());
        for (int k = 0; k < n; ++k)
            if (w[k] == '1') sum += tree.mass(w.substr(0, k) + "0");
        out.emplace_back(w, sum);
        w = detail::next_word(std::move(w));
    }
    return out;
}

// Truncated interval coordinate of a concrete point: the partial sum of the
// limit formula over the first n generators. Monotone non-decreasing in n.
inline Scalar point_code(const Measure& mu, const std::vector<CylinderSet>& gens, const Word& x,
                         int n) {
    if (n < 0 || n > static_cast<int>(gens.size()))
        throw error("point_code: depth outside the generator family");
    Scalar sum = Scalar::zero(mu.mode());
    CylinderSet funnel = CylinderSet::full(mu.system());
    for (int k = 0; k < n; ++k) {
        CylinderSet inside = intersect(funnel, gens[k]);
        if (gens[k].contains_point(x)) {
            funnel = inside;
        } else {
            sum += mu(inside);
            funnel = subtract(funnel, gens[k]);
        }
    }
    return sum;
}

// phi_m^w: conditional measure of `target` within the generator cell named
// by the binary prefix (one digit per generator). Errors on a null cell.
inline Scalar conditional_density(const Measure& mu, const std::vector<CylinderSet>& xi_gens,
                                  const CylinderSet& target, const std::string& prefix) {
    if (prefix.size() > xi_gens.size())
        throw error("conditional_density: prefix longer than the generator family");
    CylinderSet cell = CylinderSet::full(mu.system());
    for (std::size_t k = 0; k < prefix.size(); ++k) {
        if (prefix[k] != '0' && prefix[k] != '1')
            throw error("conditional_density: prefix must be binary");
        cell = intersect(cell, prefix[k] == '0' ? xi_gens[k] : xi_gens[k].complement());
    }
    Scalar denom = mu(cell);
    if (denom.is_zero())
        throw error("conditional_density: conditioning on the null cell A_" +
                    (prefix.empty() ? std::string("(empty)") : prefix));
    return mu(intersect(target, cell)) / denom;
}

// Convergence diagnostic for the conditional densities: the largest
// one-step change |phi_{m+1} - phi_m| across positive cells, for each m.
// Reported, never asserted; the almost-everywhere limit itself is not a
// finitely certifiable object.
inline std::vector<double> phi_convergence(const Measure& mu, const std::vector<CylinderSet>& gens,
                                           const CylinderSet& target, int m_max) {
    if (m_max > static_cast<int>(gens.size()))
        throw error("phi_convergence: depth outside the generator family");
    std::vector<double> deltas;
    for (int m = 1; m < m_max; ++m) {
        std::vector<CylinderSet> coarse(gens.begin(), gens.begin() + m);
        std::vector<CylinderSet> fine(gens.begin(), gens.begin() + m + 1);
        detail::GeneratorTree plain_c(mu, coarse), with_c(mu, coarse, &target);
        detail::GeneratorTree plain_f(mu, fine), with_f(mu, fine, &target);
        double worst = 0;
        std::string w(static_cast<std::size_t>(m) + 1, '0');
        for (std::size_t i = 0; i < (1ull << (m + 1)); ++i) {
            Scalar fine_mass = plain_f.mass(w);
            Scalar coarse_mass = plain_c.mass(w.substr(0, m));
            if (!fine_mass.is_zero() && !coarse_mass.is_zero()) {
                double phi_f = (with_f.mass(w) / fine_mass).value();
                double phi_c = (with_c.mass(w.substr(0, m)) / coarse_mass).value();
                worst = std::max(worst, std::abs(phi_f - phi_c));
            }
            w = detail::next_word(std::move(w));
        }
        deltas.push_back(worst);
    }
    return deltas;
}

struct ChartRect {
    std::string column, fiber;
    Scalar x0, x1, y0, y1; // half-open in both axes
};

struct SquareChart {
    int m = 0, k = 0;
    std::vector<ChartRect> rects; // column-major, lexicographic
    // fiber word -> column word -> conditional density (positive columns only)
    std::map<std::string, std::map<std::string, Scalar>> densities;

    Scalar area() const {
        Scalar a = Scalar::rational(0);
        for (const auto& r : rects) a += (r.x1 - r.x0) * (r.y1 - r.y0);
        return a;
    }
};

// Chart of the square isomorphism at partition depth m and fiber depth k:
// column footprints come from the interval map of the first m xi-generators,
// vertical extents from cumulative conditional measures of fiber cells.
// Zero-measure columns yield empty rectangles.
inline SquareChart square_chart(const Measure& mu, const std::vector<CylinderSet>& xi_gens,
                                const std::vector<CylinderSet>& fiber_gens, int m, int k) {
    if (m < 0 || m > static_cast<int>(xi_gens.size()))
        throw error("square_chart: partition depth outside the generator family");
    if (k < 0 || k > static_cast<int>(fiber_gens.size()))
        throw error("square_chart: fiber depth outside the generator family");
    std::vector<CylinderSet> xg(xi_gens.begin(), xi_gens.begin() + m);
    std::vector<CylinderSet> fg(fiber_gens.begin(), fiber_gens.begin() + k);

    SquareChart chart;
    chart.m = m;
    chart.k = k;
    IntervalMap columns = interval_map(mu, xg);
    detail::GeneratorTree xtree(mu, xg);
    for (const IntervalEntry& col : columns.entries) {
        Scalar col_mass = col.hi - col.lo;
        if (col_mass.is_zero()) {
            std::string w(static_cast<std::size_t>(k), '0');
            for (std::size_t i = 0; i < (1ull << k); ++i) {
                chart.rects.push_back({col.word, w, col.lo, col.hi, Scalar::zero(mu.mode()),
                                       Scalar::zero(mu.mode())});
                w = detail::next_word(std::move(w));
            }
            continue;
        }
        CylinderSet cell = xtree.set_of(mu.system(), xg, col.word);
        detail::GeneratorTree fibers(mu, fg, &cell);
        Scalar cursor = Scalar::zero(mu.mode());
        std::string w(static_cast<std::size_t>(k), '0');
        for (std::size_t i = 0; i < (1ull << k); ++i) {
            Scalar phi = fibers.mass(w) / col_mass;
            chart.rects.push_back({col.word, w, col.lo, col.hi, cursor, cursor + phi});
            chart.densities[w][col.word] = phi;
            cursor += phi;
            w = detail::next_word(std::move(w));
        }
    }
    return chart;
}

// One square of the 4-adic Peano construction (Hilbert orientation pattern):
// the basic interval [i 4^-n, (i+1) 4^-n) maps onto the depth-n dyadic
// square with corner (ix, iy) 2^-n.
struct PeanoSquare {
    std::uint64_t index = 0; // 4-adic interval index
    std::uint64_t ix = 0, iy = 0;
    int depth = 0;

    Scalar x0() const { return corner(ix); }
    Scalar y0() const { return corner(iy); }
    Scalar side() const {
        return Scalar::rational(1) / Scalar::rational(BigRational(BigInt(1) << depth));
    }

private:
    Scalar corner(std::uint64_t c) const {
        return Scalar::rational(BigRational(BigInt(c), BigInt(1) << depth));
    }
};

inline PeanoSquare peano_square_of_index(std::uint64_t index, int depth) {
    if (depth < 0 || depth > 24) throw error("peano: depth out of range");
    std::uint64_t x = 0, y = 0, t = index;
    for (std::uint64_t s = 1; s < (std::uint64_t{1} << depth); s <<= 1) {
        std::uint64_t rx = 1 & (t / 2);
        std::uint64_t ry = 1 & (t ^ rx);
        if (ry == 0) { // rotate quadrant
            if (rx == 1) {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::swap(x, y);
        }
        x += s * rx;
        y += s * ry;
        t /= 4;
    }
    return {index, x, y, depth};
}

// The square assigned to t's basic 4^-n interval; t = 1 lands in the last one.
inline PeanoSquare peano_cell(const Scalar& t, int depth) {
    if (t.sign() < 0 || Scalar::rational(1) < t) throw error("peano: t outside [0,1]");
    BigRational scaled = t.rat() * BigRational(BigInt(1) << (2 * depth));
    BigInt idx = numerator(scaled) / denominator(scaled);
    BigInt cap = (BigInt(1) << (2 * depth)) - 1;
    if (idx > cap) idx = cap;
    return peano_square_of_index(static_cast<std::uint64_t>(idx), depth);
}

inline std::vector<PeanoSquare> peano_tiles(int depth) {
    std::vector<PeanoSquare> out;
    const std::uint64_t n = std::uint64_t{1} << (2 * depth);
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(peano_square_of_index(i, depth));
    return out;
}

struct BasisReport {
    int depth = 0;                       // number of generators inspected
    std::uint64_t words = 0;             // 2^depth
    std::uint64_t empty_cells = 0;       // syntactically empty A_w
    std::uint64_t null_cells = 0;        // mu(A_w) = 0 (includes the empty ones)
    std::uint64_t degenerate_cells = 0;  // positive cells not split by generator n+1
    Scalar degenerate_mass;              // their total mass (atom candidates)
    bool separates = false;              // nonempty cells refine the depth-n cylinders
};

// Finite-depth basis diagnostics for a refining generator sequence.
inline BasisReport basis_report(const Measure& mu, const std::vector<CylinderSet>& gens, int n) {
    if (n < 0 || n > static_cast<int>(gens.size()))
        throw error("basis_report: depth outside the generator family");
    std::vector<CylinderSet> head(gens.begin(), gens.begin() + n);
    detail::GeneratorTree tree(mu, head);
    BasisReport rep;
    rep.depth = n;
    rep.words = std::uint64_t{1} << n;
    rep.degenerate_mass = Scalar::zero(mu.mode());

    std::vector<std::pair<std::string, CylinderSet>> atoms;
    std::string w(static_cast<std::size_t>(n), '0');
    for (std::uint64_t i = 0; i < rep.words; ++i) {
        Scalar m = tree.mass(w);
        const bool empty = tree.cell_count(w) == 0;
        if (empty) ++rep.empty_cells;
        if (m.is_zero()) ++rep.null_cells;
        if (!empty) atoms.emplace_back(w, tree.set_of(mu.system(), head, w));
        if (!m.is_zero() && n < static_cast<int>(gens.size())) {
            Scalar split = mu(intersect(atoms.back().second, gens[n]));
            if (split.is_zero() || split == m) {
                ++rep.degenerate_cells;
                rep.degenerate_mass += m;
            }
        }
        w = detail::next_word(std::move(w));
    }

    Partition atom_partition = atoms.size() == 1
                                   ? Partition::trivial(mu.system())
                                   : Partition::make(mu.system(), std::move(atoms));
    // basis property at depth n: the atoms pin down every coordinate the
    // generator family constrains
    Partition eps = Partition::point_cells(mu.system(), tree.window_start(), tree.window_len());
    rep.separates = refines(atom_partition, eps);
    return rep;
}

// The canonical coordinate generators A_k = [x_{k-1} = first symbol].
inline std::vector<CylinderSet> coordinate_generators(const SystemPtr& sys, int n) {
    std::vector<CylinderSet> gens;
    for (int k = 0; k < n; ++k)
        gens.push_back(CylinderSet::cylinder(sys, k, Cell(1, char(0))));
    return gens;
}

} // namespace ergo
