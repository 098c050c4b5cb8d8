#pragma once

// Shared fixtures: the systems and measures the test suites keep reusing.

#include <ergo/partition.hpp>

#include <random>

namespace fixtures {

using namespace ergo;

inline Scalar q(long long num, long long den = 1) { return Scalar::rational(num, den); }

inline SystemPtr sigma2() {
    static SystemPtr s = full_shift(2, Sidedness::TwoSided);
    return s;
}

inline SystemPtr sigma2_plus() {
    static SystemPtr s = full_shift(2, Sidedness::OneSided);
    return s;
}

// {0,1}^Z  cup  {2,3}^Z as a block-diagonal transition matrix.
inline SystemPtr two_component() {
    static SystemPtr s = make_system(Alphabet::of_size(4),
                                     {{1, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, 1}},
                                     Sidedness::TwoSided);
    return s;
}

// deterministic period-2 SFT
inline SystemPtr two_cycle() {
    static SystemPtr s =
        make_system(Alphabet::of_size(2), {{0, 1}, {1, 0}}, Sidedness::TwoSided);
    return s;
}

// golden-mean SFT (11 forbidden)
inline SystemPtr golden_sft() {
    static SystemPtr s =
        make_system(Alphabet::of_size(2), {{1, 1}, {1, 0}}, Sidedness::TwoSided);
    return s;
}

inline Measure bern(SystemPtr sys, std::vector<Scalar> w) {
    return bernoulli(std::move(sys), std::move(w));
}
inline Measure bern_half() { return bern(sigma2(), {q(1, 2), q(1, 2)}); }
inline Measure bern_third() { return bern(sigma2(), {q(1, 3), q(2, 3)}); }

// P = [[1/2,1/2],[1,0]] with its stationary vector (2/3, 1/3), on the full
// shift (the zero entry keeps 11-cylinders null).
inline Measure golden_markov() {
    return markov_measure(sigma2(), {{q(1, 2), q(1, 2)}, {q(1), q(0)}}, {q(2, 3), q(1, 3)});
}

// 1/2-1/2 mixture of Bernoulli(1/2,1/2) per component, realized as a
// stationary block-diagonal Markov measure.
inline Measure mixture() {
    std::vector<std::vector<Scalar>> P{{q(1, 2), q(1, 2), q(0), q(0)},
                                       {q(1, 2), q(1, 2), q(0), q(0)},
                                       {q(0), q(0), q(1, 2), q(1, 2)},
                                       {q(0), q(0), q(1, 2), q(1, 2)}};
    return markov_measure(two_component(), std::move(P), {q(1, 4), q(1, 4), q(1, 4), q(1, 4)});
}

// stationary measure on the deterministic 2-cycle
inline Measure cycle_markov() {
    return markov_measure(two_cycle(), {{q(0), q(1)}, {q(1), q(0)}}, {q(1, 2), q(1, 2)});
}

inline CylinderSet cyl(const SystemPtr& sys, int start, const std::string& labels) {
    return CylinderSet::cylinder(sys, start, parse_cell(sys, labels));
}

inline CylinderSet cyl_union(const SystemPtr& sys, int start,
                             std::initializer_list<std::string> labels) {
    std::set<Cell> cells;
    int len = 0;
    for (const std::string& s : labels) {
        Cell c = parse_cell(sys, s);
        len = static_cast<int>(c.size());
        cells.insert(std::move(c));
    }
    return CylinderSet(sys, start, len, std::move(cells));
}

// uniformly random cylinder set on a random small window
inline CylinderSet random_cylinder(const SystemPtr& sys, std::mt19937& rng, int max_len = 4) {
    std::uniform_int_distribution<int> len_d(0, max_len);
    int len = len_d(rng);
    int lo = sys->one_sided() ? 0 : -2;
    std::uniform_int_distribution<int> start_d(lo, 2);
    int start = len == 0 ? 0 : start_d(rng);
    auto all = sys->admissible_cells(start, len);
    std::set<Cell> cells;
    std::bernoulli_distribution keep(0.5);
    for (const Cell& c : all)
        if (keep(rng)) cells.insert(c);
    return CylinderSet(sys, start, len, std::move(cells));
}

} // namespace fixtures
