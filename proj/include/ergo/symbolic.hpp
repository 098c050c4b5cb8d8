#pragma once

// One- and two-sided shift spaces and subshifts of finite type.
//
// A CylinderSet is a finite union of cylinders over a common coordinate
// window [start, start+len): it stores the set of admissible words ("cells")
// occupying that window. All values are immutable after construction and
// every operation is a pure function.
//
// Set equality is decided by widening both operands to a common window and
// comparing cell sets; minimal-window forms alone are not unique on proper
// SFTs (a constraint can propagate through forced transitions), so widening
// is the reliable syntactic decision procedure.

#include "scalar.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ergo {

using Symbol = unsigned char;
using Cell = std::string; // one symbol index per byte

enum class Sidedness { OneSided, TwoSided };

class Alphabet {
public:
    explicit Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
        if (labels_.empty()) throw error("Alphabet: empty");
        if (labels_.size() > 64) throw error("Alphabet: too large for desk scale");
        for (std::size_t i = 0; i < labels_.size(); ++i)
            for (std::size_t j = i + 1; j < labels_.size(); ++j)
                if (labels_[i] == labels_[j])
                    throw error("Alphabet: duplicate label '" + labels_[i] + "'");
    }

    static Alphabet of_size(int k) {
        std::vector<std::string> labels;
        for (int i = 0; i < k; ++i) labels.push_back(std::to_string(i));
        return Alphabet(std::move(labels));
    }

    int size() const { return static_cast<int>(labels_.size()); }
    const std::string& label(Symbol s) const { return labels_.at(s); }
    const std::vector<std::string>& labels() const { return labels_; }

    Symbol index(const std::string& label) const {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == label) return static_cast<Symbol>(i);
        throw error("Alphabet: unknown label '" + label + "'");
    }

    friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.labels_ == b.labels_; }

private:
    std::vector<std::string> labels_;
};

// A concrete point sample: finitely many specified coordinates starting at
// `offset`. Enough coordinates must be present for any membership query.
struct Word {
    int offset = 0;
    Cell letters;

    int begin() const { return offset; }
    int end() const { return offset + static_cast<int>(letters.size()); }
};

class SymbolicSystem;
using SystemPtr = std::shared_ptr<const SymbolicSystem>;

class SymbolicSystem {
public:
    SymbolicSystem(Alphabet alphabet, std::vector<std::vector<int>> transition, Sidedness sided)
        : alphabet_(prune(alphabet, transition, sided, pruned_labels_)),
          sidedness_(sided) {
        const int k = alphabet_.size();
        transition_.assign(k, std::vector<bool>(k, false));
        // `transition` was rewritten by prune() to the surviving sub-matrix
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) transition_[i][j] = transition[i][j] != 0;
        for (int i = 0; i < k; ++i) {
            successors_.emplace_back();
            predecessors_.emplace_back();
        }
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (transition_[i][j]) {
                    successors_[i].push_back(static_cast<Symbol>(j));
                    predecessors_[j].push_back(static_cast<Symbol>(i));
                }
        compute_reachability();
    }

    const Alphabet& alphabet() const { return alphabet_; }
    int alphabet_size() const { return alphabet_.size(); }
    Sidedness sidedness() const { return sidedness_; }
    bool one_sided() const { return sidedness_ == Sidedness::OneSided; }
    const std::vector<std::string>& pruned_labels() const { return pruned_labels_; }

    bool allowed(Symbol a, Symbol b) const { return transition_[a][b]; }
    const std::vector<Symbol>& successors(Symbol s) const { return successors_[s]; }
    const std::vector<Symbol>& predecessors(Symbol s) const { return predecessors_[s]; }

    bool is_full_shift() const {
        for (const auto& row : transition_)
            for (bool b : row)
                if (!b) return false;
        return true;
    }

    // Symbols that can occupy coordinate `pos`. Two-sided systems are
    // coordinate-homogeneous; one-sided systems may lose predecessor-free
    // symbols after finitely many steps.
    bool occupiable(Symbol s, int pos) const {
        if (!one_sided()) return true;
        if (pos < 0) throw error("SymbolicSystem: negative coordinate on one-sided system");
        std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(pos), reach_.size() - 1);
        return reach_[idx][s];
    }

    bool word_admissible(const Cell& w) const {
        for (std::size_t i = 0; i + 1 < w.size(); ++i)
            if (!allowed(static_cast<Symbol>(w[i]), static_cast<Symbol>(w[i + 1]))) return false;
        for (char c : w)
            if (static_cast<Symbol>(c) >= alphabet_.size()) return false;
        return true;
    }

    bool cell_admissible(const Cell& w, int start) const {
        if (one_sided() && start < 0) return false;
        if (!word_admissible(w)) return false;
        if (!w.empty() && !occupiable(static_cast<Symbol>(w[0]), start)) return false;
        return true;
    }

    // All admissible cells on the window [start, start+len), sorted.
    std::vector<Cell> admissible_cells(int start, int len) const {
        if (len == 0) return {Cell{}};
        if (one_sided() && start < 0)
            throw error("SymbolicSystem: negative window on one-sided system");
        std::vector<Cell> out;
        Cell buf;
        buf.reserve(len);
        for (int s = 0; s < alphabet_size(); ++s) {
            if (!occupiable(static_cast<Symbol>(s), start)) continue;
            buf.push_back(static_cast<char>(s));
            extend(buf, len, out);
            buf.pop_back();
        }
        return out;
    }

    friend bool operator==(const SymbolicSystem& a, const SymbolicSystem& b) {
        return a.alphabet_ == b.alphabet_ && a.transition_ == b.transition_ &&
               a.sidedness_ == b.sidedness_;
    }

private:
    void extend(Cell& buf, int len, std::vector<Cell>& out) const {
        if (static_cast<int>(buf.size()) == len) {
            out.push_back(buf);
            return;
        }
        for (Symbol t : successors_[static_cast<Symbol>(buf.back())]) {
            buf.push_back(static_cast<char>(t));
            extend(buf, len, out);
            buf.pop_back();
        }
    }

    void compute_reachability() {
        const int k = alphabet_size();
        std::vector<bool> cur(k, true);
        reach_.push_back(cur);
        // monotone decreasing, stabilizes within k steps
        for (int step = 0; step < k; ++step) {
            std::vector<bool> next(k, false);
            for (int s = 0; s < k; ++s)
                if (cur[s])
                    for (Symbol t : successors_[s]) next[t] = true;
            if (next == cur) break;
            reach_.push_back(next);
            cur = next;
        }
    }

    // Iteratively removes symbols without successors (and, two-sided,
    // without predecessors); rewrites `transition` to the surviving
    // sub-matrix and returns the surviving alphabet.
    static Alphabet prune(const Alphabet& alphabet, std::vector<std::vector<int>>& transition,
                          Sidedness sided, std::vector<std::string>& pruned_out) {
        const int k = alphabet.size();
        if (static_cast<int>(transition.size()) != k)
            throw error("SymbolicSystem: transition matrix is not square over the alphabet");
        for (const auto& row : transition)
            if (static_cast<int>(row.size()) != k)
                throw error("SymbolicSystem: transition matrix is not square over the alphabet");

        std::vector<bool> alive(k, true);
        bool changed = true;
        while (changed) {
            changed = false;
            for (int s = 0; s < k; ++s) {
                if (!alive[s]) continue;
                bool has_succ = false, has_pred = false;
                for (int t = 0; t < k; ++t) {
                    if (alive[t] && transition[s][t]) has_succ = true;
                    if (alive[t] && transition[t][s]) has_pred = true;
                }
                bool dead = !has_succ || (sided == Sidedness::TwoSided && !has_pred);
                if (dead) {
                    alive[s] = false;
                    changed = true;
                }
            }
        }

        std::vector<std::string> kept;
        std::vector<int> old_index;
        for (int s = 0; s < k; ++s) {
            if (alive[s]) {
                kept.push_back(alphabet.label(static_cast<Symbol>(s)));
                old_index.push_back(s);
            } else {
                pruned_out.push_back(alphabet.label(static_cast<Symbol>(s)));
            }
        }
        if (kept.empty())
            throw error("SymbolicSystem: no surviving symbols (transition matrix has no cycles)");

        std::vector<std::vector<int>> sub(kept.size(), std::vector<int>(kept.size(), 0));
        for (std::size_t i = 0; i < kept.size(); ++i)
            for (std::size_t j = 0; j < kept.size(); ++j)
                sub[i][j] = transition[old_index[i]][old_index[j]];
        transition = std::move(sub);
        return Alphabet(std::move(kept));
    }

    std::vector<std::string> pruned_labels_;
    Alphabet alphabet_;
    Sidedness sidedness_;
    std::vector<std::vector<bool>> transition_;
    std::vector<std::vector<Symbol>> successors_;
    std::vector<std::vector<Symbol>> predecessors_;
    std::vector<std::vector<bool>> reach_; // reach_[min(pos, end)] = occupiable set
};

inline SystemPtr make_system(Alphabet alphabet, std::vector<std::vector<int>> transition,
                             Sidedness sided) {
    return std::make_shared<SymbolicSystem>(std::move(alphabet), std::move(transition), sided);
}

inline SystemPtr full_shift(int symbols, Sidedness sided) {
    return make_system(Alphabet::of_size(symbols),
                       std::vector<std::vector<int>>(symbols, std::vector<int>(symbols, 1)),
                       sided);
}

inline void require_same_system(const SystemPtr& a, const SystemPtr& b) {
    if (a == b) return;
    if (!a || !b || !(*a == *b)) throw error("operands belong to different symbolic systems");
}

class CylinderSet {
public:
    CylinderSet(SystemPtr sys, int start, int len, std::set<Cell> cells)
        : sys_(std::move(sys)), start_(start), len_(len), cells_(std::move(cells)) {
        if (!sys_) throw error("CylinderSet: null system");
        if (len_ < 0) throw error("CylinderSet: negative window length");
        if (sys_->one_sided() && start_ < 0 && len_ > 0)
            throw error("CylinderSet: negative window on one-sided system");
        for (const Cell& c : cells_)
            if (static_cast<int>(c.size()) != len_)
                throw error("CylinderSet: cell length does not match window");
        if (len_ == 0) start_ = 0;
    }

    static CylinderSet full(SystemPtr sys) { return CylinderSet(std::move(sys), 0, 0, {Cell{}}); }
    static CylinderSet empty_set(SystemPtr sys) { return CylinderSet(std::move(sys), 0, 0, {}); }

    // Single cylinder fixing the coordinates [start, start+word.size()).
    static CylinderSet cylinder(SystemPtr sys, int start, const Cell& word) {
        std::set<Cell> cells{word};
        return CylinderSet(std::move(sys), start, static_cast<int>(word.size()), std::move(cells));
    }

    const SystemPtr& system() const { return sys_; }
    int start() const { return start_; }
    int len() const { return len_; }
    int end() const { return start_ + len_; }
    const std::set<Cell>& cells() const { return cells_; }

    bool is_empty() const { return cells_.empty(); }
    bool is_full() const { return len_ == 0 && !cells_.empty(); }

    // Canonical form: inadmissible cells removed, window shrunk to the
    // essential coordinates. Idempotent.
    CylinderSet normalized() const {
        std::set<Cell> kept;
        for (const Cell& c : cells_)
            if (sys_->cell_admissible(c, start_)) kept.insert(c);
        if (kept.empty()) return empty_set(sys_);
        int a = start_, n = len_;
        bool shrunk = true;
        while (n > 0 && shrunk) {
            shrunk = false;
            if (droppable_right(kept, a, n)) { // right end unconstrained
                std::set<Cell> next;
                for (const Cell& c : kept) next.insert(c.substr(0, n - 1));
                kept = std::move(next);
                --n;
                shrunk = true;
            }
            if (n > 0 && droppable_left(kept, a, n)) {
                std::set<Cell> next;
                for (const Cell& c : kept) next.insert(c.substr(1));
                kept = std::move(next);
                ++a;
                --n;
                shrunk = true;
            }
        }
        if (n == 0) return full(sys_);
        return CylinderSet(sys_, a, n, std::move(kept));
    }

    // Same set expressed on the (larger) window [new_start, new_start+new_len).
    CylinderSet widened(int new_start, int new_len) const {
        if (is_empty()) return CylinderSet(sys_, new_start, new_len, {});
        if (len_ == 0) {

            auto all = sys_->admissible_cells(new_start, new_len);
            return CylinderSet(sys_, new_start, new_len, {all.begin(), all.end()});
        }
        if (new_start > start_ || new_start + new_len < end())
            throw error("CylinderSet: widened window must contain the current window");
        std::set<Cell> cur = cells_;
        int a = start_;
        while (a > new_start) {
            --a;
            std::set<Cell> next;
            for (const Cell& c : cur)
                for (Symbol p : sys_->predecessors(static_cast<Symbol>(c[0])))
                    if (sys_->occupiable(p, a)) next.insert(std::string(1, static_cast<char>(p)) + c);
            cur = std::move(next);
        }
        int b = start_ + len_;
        while (b < new_start + new_len) {
            std::set<Cell> next;
            for (const Cell& c : cur)
                for (Symbol t : sys_->successors(static_cast<Symbol>(c.back())))
                    next.insert(c + static_cast<char>(t));
            cur = std::move(next);
            ++b;
        }
        return CylinderSet(sys_, new_start, new_len, std::move(cur));
    }

    CylinderSet complement() const {
        CylinderSet c = normalized();
        if (c.is_full()) return empty_set(sys_);
        if (c.is_empty()) return full(sys_);
        auto all = sys_->admissible_cells(c.start_, c.len_);
        std::set<Cell> rest;
        for (const Cell& w : all)
            if (!c.cells_.count(w)) rest.insert(w);
        return CylinderSet(sys_, c.start_, c.len_, std::move(rest)).normalized();
    }

    bool contains_point(const Word& x) const {
        CylinderSet c = normalized();
        if (c.is_full()) return true;
        if (c.is_empty()) return false;
        if (x.begin() > c.start_ || x.end() < c.end())
            throw error("CylinderSet: point sample does not cover the window");
        Cell restricted = x.letters.substr(static_cast<std::size_t>(c.start_ - x.begin()),
                                           static_cast<std::size_t>(c.len_));
        return c.cells_.count(restricted) > 0;
    }

    friend CylinderSet intersect(const CylinderSet& a, const CylinderSet& b) {
        return combine(a, b, [](bool x, bool y) { return x && y; });
    }
    friend CylinderSet unite(const CylinderSet& a, const CylinderSet& b) {
        return combine(a, b, [](bool x, bool y) { return x || y; });
    }
    friend CylinderSet sym_diff(const CylinderSet& a, const CylinderSet& b) {
        return combine(a, b, [](bool x, bool y) { return x != y; });
    }
    friend CylinderSet subtract(const CylinderSet& a, const CylinderSet& b) {
        return combine(a, b, [](bool x, bool y) { return x && !y; });
    }

    bool contains(const CylinderSet& other) const {
        return intersect(*this, other) == other;
    }

    friend bool operator==(const CylinderSet& a, const CylinderSet& b) {
        require_same_system(a.sys_, b.sys_);
        CylinderSet na = a.normalized(), nb = b.normalized();
        auto [lo, hi] = common_window(na, nb);
        if (hi < lo) { // both degenerate: full/empty comparison
            return na.is_empty() == nb.is_empty();
        }
        CylinderSet wa = na.widened(lo, hi - lo);
        CylinderSet wb = nb.widened(lo, hi - lo);
        return wa.cells_ == wb.cells_;
    }
    friend bool operator!=(const CylinderSet& a, const CylinderSet& b) { return !(a == b); }

    // Deterministic, human-readable description (canonical form).
    std::string describe() const {
        CylinderSet c = normalized();
        if (c.is_full()) return "X";
        if (c.is_empty()) return "(empty)";
        std::string out = "[" + std::to_string(c.start_) + ":";
        bool first = true;
        for (const Cell& w : c.cells_) {
            if (!first) out += ",";
            first = false;
            for (char ch : w) out += sys_->alphabet().label(static_cast<Symbol>(ch));
        }
        return out + "]";
    }

private:
    template <typename Op>
    static CylinderSet combine(const CylinderSet& a, const CylinderSet& b, Op op) {
        require_same_system(a.sys_, b.sys_);
        CylinderSet na = a.normalized(), nb = b.normalized();
        auto [lo, hi] = common_window(na, nb);
        if (hi < lo) { lo = 0; hi = 0; }
        CylinderSet wa = na.widened(lo, hi - lo);
        CylinderSet wb = nb.widened(lo, hi - lo);
        auto all = a.sys_->admissible_cells(lo, hi - lo);
        std::set<Cell> cells;
        for (const Cell& w : all)
            if (op(wa.cells_.count(w) > 0, wb.cells_.count(w) > 0)) cells.insert(w);
        return CylinderSet(a.sys_, lo, hi - lo, std::move(cells)).normalized();
    }

    // Hull of the two windows, ignoring degenerate (len 0) operands.
    static std::pair<int, int> common_window(const CylinderSet& a, const CylinderSet& b) {
        int lo = 1, hi = 0;
        for (const CylinderSet* c : {&a, &b}) {
            if (c->len_ == 0) continue;
            if (hi < lo) { lo = c->start_; hi = c->end(); }
            else { lo = std::min(lo, c->start_); hi = std::max(hi, c->end()); }
        }
        return {lo, hi};
    }

    bool droppable_right(const std::set<Cell>& cells, int start, int n) const {
        // group by prefix; each group must carry every admissible continuation
        auto it = cells.begin();
        while (it != cells.end()) {
            Cell prefix = it->substr(0, n - 1);
            std::set<char> present;
            for (; it != cells.end() && it->compare(0, n - 1, prefix) == 0; ++it)
                present.insert((*it)[n - 1]);
            if (n == 1) {
                for (int s = 0; s < sys_->alphabet_size(); ++s)
                    if (sys_->occupiable(static_cast<Symbol>(s), start) &&
                        !present.count(static_cast<char>(s)))
                        return false;
            } else {
                for (Symbol t : sys_->successors(static_cast<Symbol>(prefix.back())))
                    if (!present.count(static_cast<char>(t))) return false;
            }
        }
        return true;
    }

    bool droppable_left(const std::set<Cell>& cells, int start, int n) const {
        std::set<Cell> suffixes;
        for (const Cell& c : cells) suffixes.insert(c.substr(1));
        for (const Cell& suf : suffixes) {
            std::set<char> present;
            for (const Cell& c : cells)
                if (c.compare(1, Cell::npos, suf) == 0) present.insert(c[0]);
            if (n == 1) {
                for (int s = 0; s < sys_->alphabet_size(); ++s)
                    if (sys_->occupiable(static_cast<Symbol>(s), start) &&
                        !present.count(static_cast<char>(s)))
                        return false;
            } else {
                for (Symbol p : sys_->predecessors(static_cast<Symbol>(suf[0])))
                    if (sys_->occupiable(p, start) && !present.count(static_cast<char>(p)))
                        return false;
            }
        }
        return true;
    }

    SystemPtr sys_;
    int start_;
    int len_;
    std::set<Cell> cells_;
};

inline CylinderSet normalize(const CylinderSet& c) { return c.normalized(); }

// T^{-1}(cyl): the window moves one step to the right; on one-sided systems
// the freed coordinate is unconstrained (the representation already says so).
inline CylinderSet preimage(const CylinderSet& c) {
    if (c.len() == 0) return c.normalized();
    return CylinderSet(c.system(), c.start() + 1, c.len(), c.cells()).normalized();
}

// Strongly connected transition classes of a two-sided SFT. Pruning at
// construction already restricted the alphabet to bi-infinitely extendable
// symbols. Classes are reported sorted by their smallest symbol.
inline std::vector<std::vector<Symbol>> communicating_classes(const SystemPtr& sys) {
    if (sys->one_sided())
        throw error("communicating_classes: defined for two-sided SFTs");
    const int k = sys->alphabet_size();
    // Tarjan, iterative
    std::vector<int> index(k, -1), low(k, 0), stack_pos(k, -1);
    std::vector<Symbol> stack;
    std::vector<std::vector<Symbol>> classes;
    int next_index = 0;
    for (int root = 0; root < k; ++root) {
        if (index[root] != -1) continue;
        std::vector<std::pair<Symbol, std::size_t>> work{{static_cast<Symbol>(root), 0}};
        while (!work.empty()) {
            auto& [v, ei] = work.back();
            if (ei == 0) {
                index[v] = low[v] = next_index++;
                stack_pos[v] = static_cast<int>(stack.size());
                stack.push_back(v);
            }
            bool descended = false;
            const auto& succ = sys->successors(v);
            while (ei < succ.size()) {
                Symbol w = succ[ei++];
                if (index[w] == -1) {
                    work.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (stack_pos[w] != -1) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                std::vector<Symbol> cls;
                while (true) {
                    Symbol w = stack.back();
                    stack.pop_back();
                    stack_pos[w] = -1;
                    cls.push_back(w);
                    if (w == v) break;
                }
                std::sort(cls.begin(), cls.end());
                classes.push_back(std::move(cls));
            }
            Symbol finished = v;
            work.pop_back();
            if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[finished]);
        }
    }
    std::sort(classes.begin(), classes.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return classes;
}

// Convenience: parse a cell from concatenated single-character labels.
inline Cell parse_cell(const SystemPtr& sys, const std::string& text) {
    Cell out;
    for (char ch : text) out.push_back(static_cast<char>(sys->alphabet().index(std::string(1, ch))));
    return out;
}

inline std::string cell_label(const SystemPtr& sys, const Cell& c) {
    std::string out;
    for (char ch : c) out += sys->alphabet().label(static_cast<Symbol>(ch));
    return out;
}

} // namespace ergo
