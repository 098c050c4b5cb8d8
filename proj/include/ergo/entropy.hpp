#pragma once

// Information content, conditional entropy, entropy rates, the increasing-
// partition entropy identity, tail zero-entropy verification, and the
// Pinsker partition for stationary Markov measures on SFTs.
//
// In rational mode every entropy value carries its exact pre-log form (a
// LogSum); identities are asserted on those forms and logs are evaluated in
// floating point only at the reporting boundary. Entropies are in nats.

#include "conditional.hpp"
#include "logsum.hpp"

#include <cmath>
#include <optional>

namespace ergo {

struct EntropyValue {
    std::optional<LogSum> exact; // present in rational mode
    double nats = 0.0;

    friend EntropyValue operator-(const EntropyValue& a, const EntropyValue& b) {
        EntropyValue d;
        if (a.exact && b.exact) {
            d.exact = *a.exact - *b.exact;
            d.nats = d.exact->value();
        } else {
            d.nats = a.nats - b.nats;
        }
        return d;
    }
    friend EntropyValue operator+(const EntropyValue& a, const EntropyValue& b) {
        EntropyValue s;
        if (a.exact && b.exact) {
            s.exact = *a.exact + *b.exact;
            s.nats = s.exact->value();
        } else {
            s.nats = a.nats + b.nats;
        }
        return s;
    }

    bool exactly_zero() const { return exact ? exact->is_zero() : nats == 0.0; }
    bool same_as(const EntropyValue& o, double tol = 1e-12) const {
        if (exact && o.exact) return *exact == *o.exact;
        return std::abs(nats - o.nats) <= tol;
    }
};

// H_mu(xi) = -sum mu(C) log mu(C), with 0 log 0 = 0.
inline EntropyValue information(const Measure& mu, const Partition& xi) {
    EntropyValue h;
    bool exact = mu.mode() == ScalarMode::Rational;
    if (exact) h.exact = LogSum();
    for (int i = 0; i < xi.size(); ++i) {
        Scalar m = mu(xi.element(i));
        if (m.is_zero()) continue;
        if (exact) h.exact->add_scaled(-m.rat(), LogSum::log_of(m.rat()));
        else h.nats += -m.value() * std::log(m.value());
    }
    if (exact) h.nats = h.exact->value();
    return h;
}

// H_mu(xi | eta) = sum over joint cells of mu(C cap D) * (-log mu_D(C)).
// Joint masses are accumulated cell by cell over the common window, so the
// cost scales with the number of admissible cells, not element pairs.
inline EntropyValue conditional_entropy(const Measure& mu, const Partition& xi,
                                        const Partition& eta) {
    require_same_system(xi.system(), eta.system());
    const SystemPtr& sys = xi.system();
    int lo = std::min(xi.window().first, eta.window().first);
    int hi = std::max(xi.window().first + xi.window().second,
                      eta.window().first + eta.window().second);
    if (hi < lo) { lo = 0; hi = 0; }
    auto ma = xi.cell_assignment(lo, hi - lo);
    auto mb = eta.cell_assignment(lo, hi - lo);

    std::map<std::pair<int, int>, Scalar> joint;
    std::map<int, Scalar> marginal;
    for (const auto& [cell, i] : ma) {
        Scalar m = mu(CylinderSet::cylinder(sys, lo, cell));
        if (m.is_zero()) continue;
        int j = mb.at(cell);
        auto jt = joint.find({i, j});
        if (jt == joint.end()) joint.emplace(std::pair<int, int>{i, j}, m);
        else jt->second += m;
        auto mt = marginal.find(j);
        if (mt == marginal.end()) marginal.emplace(j, m);
        else mt->second += m;
    }

    EntropyValue h;
    bool exact = mu.mode() == ScalarMode::Rational;
    if (exact) h.exact = LogSum();
    for (const auto& [pair, mcd] : joint) {
        const Scalar& md = marginal.at(pair.second);
        if (exact) h.exact->add_scaled(-mcd.rat(), LogSum::log_of(mcd.rat() / md.rat()));
        else h.nats += -mcd.value() * std::log(mcd.value() / md.value());
    }
    if (exact) h.nats = h.exact->value();
    return h;
}

struct EntropyReport {
    std::vector<EntropyValue> H;          // H_n for n = 1..n_max
    std::vector<EntropyValue> increments; // H_n - H_{n-1} (H_0 = 0)
    std::vector<double> rates;            // H_n / n
    bool stabilized = false;              // increments constant from some n0
    int stabilized_from = 0;
    bool invariant_measure = true;        // false flags the warned case
    ScalarMode mode = ScalarMode::Rational;
};

// H_n = H(join of T^{-k} xi, k < n) for n <= n_max, with increments and
// per-step rates. Non-invariant measures are allowed but flagged.
inline EntropyReport entropy_rate(const Measure& mu, const Partition& xi, int n_max) {
    if (n_max < 1) throw error("entropy_rate: n_max must be >= 1");
    EntropyReport rep;
    rep.mode = mu.mode();
    rep.invariant_measure = mu.is_invariant();
    Partition acc = xi;
    Partition shifted = xi;
    EntropyValue prev; // H_0 = 0
    if (mu.mode() == ScalarMode::Rational) prev.exact = LogSum();
    for (int n = 1; n <= n_max; ++n) {
        if (n > 1) {
            shifted = preimage(shifted);
            acc = join(acc, shifted);
        }
        EntropyValue h = information(mu, acc);
        rep.H.push_back(h);
        rep.increments.push_back(h - prev);
        rep.rates.push_back(h.nats / n);
        prev = h;
    }
    for (int n0 = 0; n0 < static_cast<int>(rep.increments.size()); ++n0) {
        bool constant = true;
        for (std::size_t i = n0 + 1; i < rep.increments.size(); ++i)
            if (!rep.increments[i].same_as(rep.increments[n0])) { constant = false; break; }
        if (constant) {
            rep.stabilized = true;
            rep.stabilized_from = n0; // increments H_{n+1}-H_n constant for n >= n0
            break;
        }
    }
    return rep;
}

// lhs: the increment H_{n+1} - H_n. rhs: H(past_n | T^{-1} past_n), the
// increasing-partition identity truncated to the finite algebra. The two
// agree exactly for Markov measures once n >= 1.
inline std::pair<EntropyValue, EntropyValue> entropy_identity_check(const Measure& mu,
                                                                    const Partition& xi, int n) {
    if (n < 0) throw error("entropy_identity_check: negative depth");
    Partition past_n = past_refinement(xi, n);
    EntropyValue h_next = information(mu, past_n);
    EntropyValue h_cur =
        n == 0 ? EntropyValue{mu.mode() == ScalarMode::Rational ? std::optional<LogSum>(LogSum())
                                                                : std::nullopt,
                              0.0}
               : information(mu, past_refinement(xi, n - 1));
    EntropyValue lhs = h_next - h_cur;
    EntropyValue rhs = conditional_entropy(mu, past_n, preimage(past_n));
    return {lhs, rhs};
}

struct TailEntropyReport {
    Partition hull;     // Pi(xi): invariant hull of the tail partition
    EntropyReport rate; // entropy rate of the hull
    bool pass = false;  // all increments exactly zero
};

// Pi(xi) has zero entropy: computes the invariant hull of the tail partition
// and verifies every per-step gain H_{n+1} - H_n for n >= 1 vanishes (the
// n = 0 increment is the hull's own information content, nonzero whenever
// the hull is nontrivial).
inline TailEntropyReport tail_zero_entropy_check(const Measure& mu, const Partition& xi,
                                                 int n_max) {
    const int n = std::min(n_max, 2);
    Partition tail = past_refinement(xi, n);
    for (int k = 0; k < n; ++k) tail = preimage(tail);
    TailEntropyReport rep{invariant_hull(tail, mu), {}, false};
    rep.rate = entropy_rate(mu, rep.hull, n_max);
    rep.pass = true;
    for (std::size_t i = 1; i < rep.rate.increments.size(); ++i) {
        const EntropyValue& inc = rep.rate.increments[i];
        bool zero = mu.mode() == ScalarMode::Rational ? inc.exactly_zero()
                                                      : std::abs(inc.nats) <= 1e-12;
        if (!zero) rep.pass = false;
    }
    return rep;
}

// The Pinsker partition of a stationary Markov measure at a requested depth.
//
// Classes are the strongly connected components of the measure's support
// graph (edges with pi_i P_ij > 0); stationarity makes them closed. A class
// whose rows are deterministic carries zero per-step entropy and contributes
// its full depth algebra; a class with a genuinely random row stays whole.
// Null symbols ride along with the first class.
inline Partition pinsker_partition(const Measure& mu, int depth) {
    if (mu.kind() == MeasureKind::Table)
        throw error("pinsker_partition: needs a Markov (or Bernoulli) measure");
    if (!mu.is_invariant()) throw error("pinsker_partition: measure must be stationary");
    if (depth < 1) throw error("pinsker_partition: depth must be >= 1");
    const SystemPtr& sys = mu.system();
    const int k = sys->alphabet_size();

    // uniform view: Bernoulli is the Markov chain with identical rows
    std::vector<std::vector<Scalar>> P;
    std::vector<Scalar> pi;
    if (mu.kind() == MeasureKind::Bernoulli) {
        P.assign(k, mu.bernoulli_weights());
        pi = mu.bernoulli_weights();
    } else {
        P = mu.markov_matrix();
        pi = mu.initial_vector();
    }

    std::vector<int> positive;
    for (int i = 0; i < k; ++i)
        if (pi[i].sign() > 0) positive.push_back(i);

    // strong components of the support graph, by repeated reachability
    std::vector<std::vector<int>> classes;
    {
        auto reach = [&](int from, std::vector<bool>& seen) {
            std::vector<int> stack{from};
            seen[from] = true;
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                for (int w = 0; w < k; ++w)
                    if (!seen[w] && pi[w].sign() > 0 && P[v][w].sign() > 0) {
                        seen[w] = true;
                        stack.push_back(w);
                    }
            }
        };
        std::vector<bool> assigned(k, false);
        for (int i : positive) {
            if (assigned[i]) continue;
            std::vector<bool> fwd(k, false), bwd(k, false);
            reach(i, fwd);
            // backward reachability over reversed edges
            std::vector<int> stack{i};
            bwd[i] = true;
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                for (int w = 0; w < k; ++w)
                    if (!bwd[w] && pi[w].sign() > 0 && P[w][v].sign() > 0) {
                        bwd[w] = true;
                        stack.push_back(w);
                    }
            }
            std::vector<int> cls;
            for (int w : positive)
                if (fwd[w] && bwd[w] && !assigned[w]) {
                    cls.push_back(w);
                    assigned[w] = true;
                }
            classes.push_back(std::move(cls));
        }
    }

    auto deterministic = [&](const std::vector<int>& cls) {
        for (int i : cls) {
            int fanout = 0;
            for (int j = 0; j < k; ++j)
                if (P[i][j].sign() > 0) ++fanout;
            if (fanout != 1) return false;
        }
        return true;
    };

    std::set<Cell> stray; // cells led by null symbols
    std::vector<bool> is_positive(k, false);
    for (int i : positive) is_positive[i] = true;
    for (const Cell& w : sys->admissible_cells(0, depth))
        if (!is_positive[static_cast<Symbol>(w[0])]) stray.insert(w);

    std::vector<std::pair<std::string, CylinderSet>> elems;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        std::set<int> members(classes[c].begin(), classes[c].end());
        std::set<Cell> owned;
        for (const Cell& w : sys->admissible_cells(0, depth))
            if (members.count(static_cast<Symbol>(w[0]))) owned.insert(w);
        if (deterministic(classes[c])) {
            for (const Cell& w : owned)
                elems.emplace_back(cell_label(sys, w),
                                   CylinderSet::cylinder(sys, 0, w));
        } else {
            elems.emplace_back("K" + std::to_string(c), CylinderSet(sys, 0, depth, owned));
        }
        if (c == 0 && !stray.empty()) {
            // attach null-symbol cells to the first element built above
            auto& [label, set] = elems.front();
            set = unite(set, CylinderSet(sys, 0, depth, stray));
        }
    }
    return Partition::make(sys, std::move(elems));
}

} // namespace ergo
