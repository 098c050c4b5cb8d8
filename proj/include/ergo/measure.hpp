#pragma once

// Measures on the cylinder algebra: Bernoulli products, stationary (or
// merely initialized) Markov chains, and explicit finite-depth tables.
//
// Markov measures are anchored at coordinate 0: the marginal at coordinate
// k >= 0 is p P^k. For stationary initial vectors (pP = p) the measure is
// shift-invariant and windows may extend to negative coordinates; for
// non-stationary vectors such windows are rejected.

#include "symbolic.hpp"

#include <map>
#include <optional>
#include <vector>

namespace ergo {

enum class MeasureKind { Bernoulli, Markov, Table };

class Measure {
public:
    static Measure bernoulli(SystemPtr sys, std::vector<Scalar> weights) {
        if (!sys->is_full_shift())
            throw error("bernoulli: system is a proper SFT; use markov_measure instead");
        Measure m(std::move(sys), MeasureKind::Bernoulli, uniform_mode(weights));
        if (static_cast<int>(weights.size()) != m.sys_->alphabet_size())
            throw error("bernoulli: weights not indexed by the alphabet");
        require_distribution(weights, m.mode_, "bernoulli weights");
        m.weights_ = std::move(weights);
        return m;
    }

    static Measure markov(SystemPtr sys, std::vector<std::vector<Scalar>> P,
                          std::vector<Scalar> p) {
        std::vector<Scalar> flat;
        for (auto& row : P) flat.insert(flat.end(), row.begin(), row.end());
        flat.insert(flat.end(), p.begin(), p.end());
        Measure m(std::move(sys), MeasureKind::Markov, uniform_mode(flat));
        const int k = m.sys_->alphabet_size();
        if (static_cast<int>(P.size()) != k)
            throw error("markov_measure: P is not square over the alphabet");
        for (int i = 0; i < k; ++i) {
            if (static_cast<int>(P[i].size()) != k)
                throw error("markov_measure: P is not square over the alphabet");
            require_distribution(P[i], m.mode_, "markov row");
            for (int j = 0; j < k; ++j)
                if (!P[i][j].is_zero() && !m.sys_->allowed(static_cast<Symbol>(i), static_cast<Symbol>(j)))
                    throw error("markov_measure: P supported on the forbidden transition " +
                                m.sys_->alphabet().label(static_cast<Symbol>(i)) + "->" +
                                m.sys_->alphabet().label(static_cast<Symbol>(j)));
        }
        if (static_cast<int>(p.size()) != k)
            throw error("markov_measure: initial vector not indexed by the alphabet");
        require_distribution(p, m.mode_, "markov initial vector");
        m.P_ = std::move(P);
        m.p0_ = std::move(p);
        m.stationary_ = m.row_vector_fixed();
        return m;
    }

    // Explicit weights on the admissible cells of [start, start+len).
    // Total mass may be below 1 (decomposition parts are sub-probability).
    static Measure table(SystemPtr sys, int start, int len, std::map<Cell, Scalar> weights) {
        ScalarMode mode = ScalarMode::Rational;
        if (!weights.empty()) {
            std::vector<Scalar> vals;
            for (auto& [c, w] : weights) vals.push_back(w);
            mode = uniform_mode(vals);
        }
        Measure m(std::move(sys), MeasureKind::Table, mode);
        for (auto& [cell, w] : weights) {
            if (static_cast<int>(cell.size()) != len)
                throw error("table measure: cell length does not match the window");
            if (!m.sys_->cell_admissible(cell, start))
                throw error("table measure: weight on inadmissible cell");
            if (w.sign() < 0) throw error("table measure: negative weight");
        }
        m.tbl_start_ = start;
        m.tbl_len_ = len;
        m.table_ = std::move(weights);
        return m;
    }

    const SystemPtr& system() const { return sys_; }
    MeasureKind kind() const { return kind_; }
    ScalarMode mode() const { return mode_; }
    bool is_invariant() const {
        return kind_ == MeasureKind::Bernoulli || (kind_ == MeasureKind::Markov && stationary_);
    }
    const std::vector<Scalar>& bernoulli_weights() const { return weights_; }
    const std::vector<std::vector<Scalar>>& markov_matrix() const { return P_; }
    const std::vector<Scalar>& initial_vector() const { return p0_; }
    std::pair<int, int> table_window() const { return {tbl_start_, tbl_len_}; }
    const std::map<Cell, Scalar>& table_weights() const { return table_; }

    Scalar total() const {
        if (kind_ != MeasureKind::Table) return Scalar::one(mode_);
        Scalar t = Scalar::zero(mode_);
        for (const auto& [c, w] : table_) t += w;
        return t;
    }

    Scalar operator()(const CylinderSet& cyl) const {
        require_same_system(sys_, cyl.system());
        CylinderSet c = cyl.normalized();
        if (c.is_empty()) return Scalar::zero(mode_);
        switch (kind_) {
        case MeasureKind::Bernoulli: {
            if (c.is_full()) return Scalar::one(mode_);
            Scalar sum = Scalar::zero(mode_);
            for (const Cell& w : c.cells()) {
                Scalar prod = Scalar::one(mode_);
                for (char ch : w) prod *= weights_[static_cast<Symbol>(ch)];
                sum += prod;
            }
            return sum;
        }
        case MeasureKind::Markov: {
            if (c.is_full()) return Scalar::one(mode_);
            std::vector<Scalar> v = marginal_at(c.start());
            Scalar sum = Scalar::zero(mode_);
            for (const Cell& w : c.cells()) {
                Scalar prod = v[static_cast<Symbol>(w[0])];
                for (std::size_t i = 0; i + 1 < w.size(); ++i)
                    prod *= P_[static_cast<Symbol>(w[i])][static_cast<Symbol>(w[i + 1])];
                sum += prod;
            }
            return sum;
        }
        case MeasureKind::Table: {
            if (c.is_full()) return total();
            if (c.start() < tbl_start_ || c.end() > tbl_start_ + tbl_len_)
                throw error("table measure: cylinder " + c.describe() +
                            " lies outside the table window");
            CylinderSet w = c.widened(tbl_start_, tbl_len_);
            Scalar sum = Scalar::zero(mode_);
            for (const Cell& cell : w.cells()) {
                auto it = table_.find(cell);
                if (it != table_.end()) sum += it->second;
            }
            return sum;
        }
        }
        throw error("unreachable");
    }

private:
    Measure(SystemPtr sys, MeasureKind kind, ScalarMode mode)
        : sys_(std::move(sys)), kind_(kind), mode_(mode) {
        if (!sys_) throw error("Measure: null system");
    }

    static ScalarMode uniform_mode(const std::vector<Scalar>& vals) {
        if (vals.empty()) return ScalarMode::Rational;
        ScalarMode m = vals.front().mode();
        for (const Scalar& v : vals)
            if (v.mode() != m) throw error("Measure: mixed scalar modes in one parameter block");
        return m;
    }

    static void require_distribution(const std::vector<Scalar>& w, ScalarMode mode,
                                     const std::string& what) {
        Scalar sum = Scalar::zero(mode);
        for (const Scalar& x : w) {
            if (x.sign() < 0) throw error(what + ": negative entry");
            sum += x;
        }
        bool ok = mode == ScalarMode::Rational ? sum == Scalar::one(mode)
                                               : std::abs(sum.value() - 1.0) <= 1e-12;
        if (!ok) throw error(what + ": entries sum to " + sum.str() + ", expected 1");
    }

    bool row_vector_fixed() const {
        const int k = sys_->alphabet_size();
        for (int j = 0; j < k; ++j) {
            Scalar s = Scalar::zero(mode_);
            for (int i = 0; i < k; ++i) s += p0_[i] * P_[i][j];
            if (mode_ == ScalarMode::Rational) {
                if (s != p0_[j]) return false;
            } else if (std::abs(s.value() - p0_[j].value()) > 1e-12) {
                return false;
            }
        }
        return true;
    }

    std::vector<Scalar> marginal_at(int pos) const {
        if (stationary_ || pos == 0) {
            if (pos < 0 && !stationary_)
                throw error("markov measure: negative window needs a stationary initial vector");
            return p0_;
        }
        if (pos < 0)
            throw error("markov measure: negative window needs a stationary initial vector");
        std::vector<Scalar> v = p0_;
        const int k = sys_->alphabet_size();
        for (int step = 0; step < pos; ++step) {
            std::vector<Scalar> next(k, Scalar::zero(mode_));
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) next[j] += v[i] * P_[i][j];
            v = std::move(next);
        }
        return v;
    }

    SystemPtr sys_;
    MeasureKind kind_;
    ScalarMode mode_;
    std::vector<Scalar> weights_;
    std::vector<std::vector<Scalar>> P_;
    std::vector<Scalar> p0_;
    bool stationary_ = false;
    int tbl_start_ = 0, tbl_len_ = 0;
    std::map<Cell, Scalar> table_;
};

inline Measure bernoulli(SystemPtr sys, std::vector<Scalar> weights) {
    return Measure::bernoulli(std::move(sys), std::move(weights));
}
inline Measure markov_measure(SystemPtr sys, std::vector<std::vector<Scalar>> P,
                              std::vector<Scalar> p) {
    return Measure::markov(std::move(sys), std::move(P), std::move(p));
}
inline Scalar measure_of(const Measure& mu, const CylinderSet& cyl) { return mu(cyl); }

struct InvarianceReport {
    bool pass = true;
    Scalar worst_discrepancy;
    std::string worst_cell;
    int worst_depth = 0;
};

// Verifies mu(T^{-1} C) = mu(C) for every cell C of depth <= depth.
inline InvarianceReport check_invariance(const Measure& mu, int depth) {
    if (depth < 1) throw error("check_invariance: depth must be >= 1");
    const SystemPtr& sys = mu.system();
    InvarianceReport rep;
    rep.worst_discrepancy = Scalar::zero(mu.mode());
    for (int d = 1; d <= depth; ++d) {
        for (const Cell& w : sys->admissible_cells(0, d)) {
            CylinderSet c = CylinderSet::cylinder(sys, 0, w);
            Scalar direct = mu(c);
            Scalar pulled = mu(preimage(c));
            Scalar diff = direct < pulled ? pulled - direct : direct - pulled;
            if (rep.worst_discrepancy < diff) {
                rep.worst_discrepancy = diff;
                rep.worst_cell = cell_label(sys, w);
                rep.worst_depth = d;
            }
        }
    }
    bool exact = mu.mode() == ScalarMode::Rational;
    rep.pass = exact ? rep.worst_discrepancy.is_zero() : rep.worst_discrepancy.value() <= 1e-12;
    return rep;
}

// d(nu)/d(mu) on the algebra of cells over [0, depth).
struct DensityTable {
    int depth = 0;
    std::map<Cell, Scalar> values; // defined exactly on mu-positive cells

    Scalar at(const Cell& cell) const {
        auto it = values.find(cell);
        if (it == values.end()) throw error("DensityTable: density undefined on a mu-null cell");
        return it->second;
    }
};

inline DensityTable rn_derivative(const Measure& nu, const Measure& mu, int depth) {
    require_same_system(nu.system(), mu.system());
    DensityTable tab;
    tab.depth = depth;
    for (const Cell& w : mu.system()->admissible_cells(0, depth)) {
        CylinderSet c = CylinderSet::cylinder(mu.system(), 0, w);
        Scalar m = mu(c), n = nu(c);
        if (m.is_zero()) {
            if (!n.is_zero())
                throw error("rn_derivative: absolute continuity fails on cell [" +
                            cell_label(mu.system(), w) + "]: mu = 0, nu = " + n.str());
            continue;
        }
        tab.values.emplace(w, n / m);
    }
    return tab;
}

// nu = nu_ac + nu_sing with nu_ac << mu and nu_sing carried by the union of
// mu-null cells of the depth algebra. Both parts are depth tables.
inline std::pair<Measure, Measure> rn_decompose(const Measure& nu, const Measure& mu, int depth) {
    require_same_system(nu.system(), mu.system());
    std::map<Cell, Scalar> ac, sing;
    for (const Cell& w : mu.system()->admissible_cells(0, depth)) {
        CylinderSet c = CylinderSet::cylinder(mu.system(), 0, w);
        Scalar m = mu(c), n = nu(c);
        if (n.is_zero()) continue;
        if (m.is_zero()) sing.emplace(w, n); else ac.emplace(w, n);
    }
    return {Measure::table(nu.system(), 0, depth, std::move(ac)),
            Measure::table(nu.system(), 0, depth, std::move(sing))};
}

} // namespace ergo
