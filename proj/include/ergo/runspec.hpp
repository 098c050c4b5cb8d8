#pragma once

// The declarative front end: parses system/measure/partition/cylinder
// blocks plus a task list (TOML or its JSON mirror), dispatches to the
// library, and renders deterministic CSV + JSON artifacts per task.
//
// Exactness contract: fractions travel as strings ("2/3"); CSV carries both
// the exact fraction and a 12-digit decimal; outputs are byte-stable across
// runs (sorted keys, no timestamps).

#include "entropy.hpp"
#include "rokhlin.hpp"
#include "toml_lite.hpp"
#include "toral.hpp"

#include <fstream>
#include <optional>
#include <sstream>

namespace ergo {

struct spec_error : error {
    using error::error;
};
struct depth_error : error {
    using error::error;
};

struct RunLimits {
    int max_depth = 16;
};

namespace specdetail {

using nlohmann::json;

inline const json& need(const json& obj, const std::string& key, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end()) throw spec_error(ctx + ": missing key '" + key + "'");
    return *it;
}

inline std::string need_string(const json& obj, const std::string& key, const std::string& ctx) {
    const json& v = need(obj, key, ctx);
    if (!v.is_string()) throw spec_error(ctx + ": key '" + key + "' must be a string");
    return v.get<std::string>();
}

inline int get_int(const json& obj, const std::string& key, int fallback, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number_integer()) throw spec_error(ctx + ": key '" + key + "' must be an integer");
    return it->get<int>();
}

inline Scalar parse_scalar(const json& v, ScalarMode mode, const std::string& ctx) {
    if (v.is_string()) return Scalar::parse(v.get<std::string>(), mode);
    if (v.is_number_integer())
        return mode == ScalarMode::Rational ? Scalar::rational(v.get<long long>())
                                            : Scalar::floating(v.get<double>());
    if (v.is_number_float()) {
        if (mode == ScalarMode::Rational)
            throw spec_error(ctx + ": bare floats are not exact; quote the value (\"1/3\", \"0.25\")");
        return Scalar::floating(v.get<double>());
    }
    throw spec_error(ctx + ": expected a number or fraction string");
}

inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace specdetail

struct TaskOutput {
    std::string name; // output file stem
    std::string type;
    std::string csv;
    nlohmann::json summary;
};

class RunSpec {
public:
    static RunSpec from_file(const std::string& path, ScalarMode mode, const RunLimits& limits) {
        std::ifstream in(path);
        if (!in) throw spec_error("cannot read spec file '" + path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        nlohmann::json doc;
        if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
            doc = nlohmann::json::parse(buf.str()); // throws json::parse_error
        else
            doc = toml::parse(buf.str());
        return parse(doc, mode, limits);
    }

    static RunSpec parse(const nlohmann::json& doc, ScalarMode mode, const RunLimits& limits) {
        using specdetail::need;
        using specdetail::parse_scalar;
        RunSpec spec;
        spec.mode_ = mode;
        if (!doc.is_object()) throw spec_error("spec root must be a table");
        for (const auto& [key, value] : doc.items())
            if (key != "system" && key != "measures" && key != "partitions" &&
                key != "cylinders" && key != "tasks")
                throw spec_error("unknown section '" + key + "'");

        if (doc.contains("system")) spec.parse_system(doc.at("system"));
        if (doc.contains("measures"))
            for (const auto& [name, block] : doc.at("measures").items())
                spec.parse_measure(name, block);
        if (doc.contains("partitions"))
            for (const auto& [name, block] : doc.at("partitions").items())
                spec.parse_partition(name, block);
        if (doc.contains("cylinders"))
            for (const auto& [name, block] : doc.at("cylinders").items())
                spec.parse_cylinder(name, block);
        if (doc.contains("tasks")) {
            const nlohmann::json& tasks = doc.at("tasks");
            if (!tasks.is_array()) throw spec_error("'tasks' must be an array of tables");
            for (const auto& t : tasks) {
                if (!t.is_object() || !t.contains("type"))
                    throw spec_error("every task needs a 'type'");
                spec.tasks_.push_back(t);
            }
        }
        spec.limits_ = limits;
        return spec;
    }

    const std::vector<nlohmann::json>& tasks() const { return tasks_; }
    ScalarMode mode() const { return mode_; }

    // Canonical JSON mirror; re-parses to an equivalent spec.
    nlohmann::json normalized() const {
        nlohmann::json out = nlohmann::json::object();
        if (system_) {
            nlohmann::json sys;
            sys["alphabet"] = system_->alphabet().labels();
            nlohmann::json rows = nlohmann::json::array();
            for (int i = 0; i < system_->alphabet_size(); ++i) {
                nlohmann::json row = nlohmann::json::array();
                for (int j = 0; j < system_->alphabet_size(); ++j)
                    row.push_back(system_->allowed(static_cast<Symbol>(i), static_cast<Symbol>(j)) ? 1 : 0);
                rows.push_back(row);
            }
            sys["transition"] = rows;
            sys["sidedness"] = system_->one_sided() ? "one-sided" : "two-sided";
            out["system"] = sys;
        }
        if (!measure_blocks_.empty()) out["measures"] = measure_blocks_;
        if (!partition_blocks_.empty()) out["partitions"] = partition_blocks_;
        if (!cylinder_blocks_.empty()) out["cylinders"] = cylinder_blocks_;
        if (!tasks_.empty()) out["tasks"] = tasks_;
        return out;
    }

    std::vector<TaskOutput> run_all(bool bits) const {
        std::vector<TaskOutput> out;
        std::map<std::string, int> used_names;
        for (const nlohmann::json& task : tasks_) {
            TaskOutput t = run_task(task, bits, -1);
            if (int n = used_names[t.name]++; n > 0) t.name += "-" + std::to_string(n + 1);
            out.push_back(std::move(t));
        }
        return out;
    }

    // Executes one task block. depth_override >= 0 replaces the task's own
    // depth parameters (plotdata's --depth flag).
    TaskOutput run_task(const nlohmann::json& task, bool bits, int depth_override) const {
        std::string type = specdetail::need_string(task, "type", "task");
        TaskOutput out;
        out.type = type;
        out.name = task.contains("name") ? specdetail::need_string(task, "name", "task") : type;
        if (type == "entropy") run_entropy(task, bits, depth_override, out);
        else if (type == "isomorphism") run_isomorphism(task, depth_override, out);
        else if (type == "conditional") run_conditional(task, bits, depth_override, out);
        else if (type == "decompose") run_decompose(task, depth_override, out);
        else if (type == "rn") run_rn(task, depth_override, out);
        else if (type == "pesin") run_pesin(task, out);
        else if (type == "square-chart") run_square_chart(task, depth_override, out);
        else if (type == "peano") run_peano(task, depth_override, out);
        else throw spec_error("unknown task type '" + type + "'");
        out.summary["task"] = type;
        return out;
    }

private:
    RunSpec() = default;

    int checked_depth(int depth, const std::string& ctx) const {
        if (depth < 0) throw spec_error(ctx + ": negative depth");
        if (depth > limits_.max_depth)
            throw depth_error(ctx + ": depth " + std::to_string(depth) + " exceeds the limit " +
                              std::to_string(limits_.max_depth));
        return depth;
    }

    int task_depth(const nlohmann::json& task, const char* key, int fallback, int override_,
                   const std::string& ctx) const {
        int d = override_ >= 0 ? override_ : specdetail::get_int(task, key, fallback, ctx);
        return checked_depth(d, ctx);
    }

    const SystemPtr& system(const std::string& ctx) const {
        if (!system_) throw spec_error(ctx + ": spec has no [system] block");
        return system_;
    }

    const Measure& measure(const nlohmann::json& task, const std::string& key,
                           const std::string& ctx) const {
        std::string name = specdetail::need_string(task, key, ctx);
        auto it = measures_.find(name);
        if (it == measures_.end()) throw spec_error(ctx + ": unknown measure '" + name + "'");
        return it->second;
    }

    const Partition& partition(const nlohmann::json& task, const std::string& ctx) const {
        std::string name = specdetail::need_string(task, "partition", ctx);
        auto it = partitions_.find(name);
        if (it == partitions_.end()) throw spec_error(ctx + ": unknown partition '" + name + "'");
        return it->second;
    }

    std::vector<CylinderSet> generators(const nlohmann::json& task, const std::string& key,
                                        int depth_override, const std::string& ctx) const {
        const nlohmann::json& g = specdetail::need(task, key, ctx);
        if (g.is_string()) {
            if (g.get<std::string>() != "coordinates")
                throw spec_error(ctx + ": '" + key + "' must be \"coordinates\" or a name list");
            int depth = task_depth(task, "depth", 4, depth_override, ctx);
            return coordinate_generators(system(ctx), depth);
        }
        if (!g.is_array()) throw spec_error(ctx + ": '" + key + "' must be a list of cylinder names");
        std::vector<CylinderSet> out;
        for (const auto& item : g) {
            if (!item.is_string()) throw spec_error(ctx + ": generator names must be strings");
            auto it = cylinders_.find(item.get<std::string>());
            if (it == cylinders_.end())
                throw spec_error(ctx + ": unknown cylinder '" + item.get<std::string>() + "'");
            out.push_back(it->second);
        }
        return out;
    }

    // ---- block parsers ----

    void parse_system(const nlohmann::json& block) {
        using specdetail::need;
        std::vector<std::string> labels;
        const nlohmann::json& alpha = need(block, "alphabet", "system");
        if (alpha.is_number_integer()) {
            for (int i = 0; i < alpha.get<int>(); ++i) labels.push_back(std::to_string(i));
        } else if (alpha.is_array()) {
            for (const auto& l : alpha)
                labels.push_back(l.is_string() ? l.get<std::string>() : l.dump());
        } else {
            throw spec_error("system: 'alphabet' must be a label list or a size");
        }
        const int k = static_cast<int>(labels.size());
        std::vector<std::vector<int>> rows;
        const nlohmann::json& tr = need(block, "transition", "system");
        if (tr.is_string() && tr.get<std::string>() == "full") {
            rows.assign(k, std::vector<int>(k, 1));
        } else if (tr.is_array()) {
            for (const auto& r : tr) {
                if (!r.is_array()) throw spec_error("system: 'transition' must be a matrix of 0/1");
                std::vector<int> row;
                for (const auto& x : r) row.push_back(x.get<int>());
                rows.push_back(std::move(row));
            }
        } else {
            throw spec_error("system: 'transition' must be \"full\" or a matrix");
        }
        std::string sided = block.contains("sidedness")
                                ? specdetail::need_string(block, "sidedness", "system")
                                : "two-sided";
        if (sided != "two-sided" && sided != "one-sided")
            throw spec_error("system: 'sidedness' must be \"one-sided\" or \"two-sided\"");
        system_ = make_system(Alphabet(labels),
                              std::move(rows),
                              sided == "one-sided" ? Sidedness::OneSided : Sidedness::TwoSided);
    }

    Cell parse_word(const std::string& text, const std::string& ctx) const {
        for (const std::string& label : system(ctx)->alphabet().labels())
            if (label.size() != 1)
                throw spec_error(ctx + ": cell strings need single-character symbol labels");
        try {
            return parse_cell(system(ctx), text);
        } catch (const error& e) {
            throw spec_error(ctx + ": " + e.what());
        }
    }

    void parse_measure(const std::string& name, const nlohmann::json& block) {
        using specdetail::parse_scalar;
        const std::string ctx = "measures." + name;
        std::string kind = specdetail::need_string(block, "kind", ctx);
        if (kind == "bernoulli") {
            std::vector<Scalar> w;
            for (const auto& v : specdetail::need(block, "weights", ctx))
                w.push_back(parse_scalar(v, mode_, ctx));
            measures_.emplace(name, bernoulli(system(ctx), std::move(w)));
        } else if (kind == "markov") {
            std::vector<std::vector<Scalar>> P;
            for (const auto& row : specdetail::need(block, "matrix", ctx)) {
                std::vector<Scalar> r;
                for (const auto& v : row) r.push_back(parse_scalar(v, mode_, ctx));
                P.push_back(std::move(r));
            }
            std::vector<Scalar> p;
            for (const auto& v : specdetail::need(block, "initial", ctx))
                p.push_back(parse_scalar(v, mode_, ctx));
            measures_.emplace(name, markov_measure(system(ctx), std::move(P), std::move(p)));
        } else if (kind == "table") {
            int start = specdetail::get_int(block, "start", 0, ctx);
            std::map<Cell, Scalar> weights;
            int len = -1;
            for (const auto& [word, value] : specdetail::need(block, "cells", ctx).items()) {
                Cell c = parse_word(word, ctx);
                if (len < 0) len = static_cast<int>(c.size());
                if (static_cast<int>(c.size()) != len)
                    throw spec_error(ctx + ": table cells must share one length");
                weights.emplace(std::move(c), parse_scalar(value, mode_, ctx));
            }
            if (len < 0) throw spec_error(ctx + ": empty table");
            measures_.emplace(name, Measure::table(system(ctx), start, len, std::move(weights)));
        } else {
            throw spec_error(ctx + ": unknown kind '" + kind + "'");
        }
        measure_blocks_[name] = block;
    }

    void parse_partition(const std::string& name, const nlohmann::json& block) {
        const std::string ctx = "partitions." + name;
        int start = specdetail::get_int(block, "start", 0, ctx);
        const nlohmann::json& elements = specdetail::need(block, "elements", ctx);
        std::vector<std::pair<std::string, CylinderSet>> elems;
        for (const auto& [label, cells] : elements.items()) {
            if (!cells.is_array()) throw spec_error(ctx + ": element '" + label + "' must list cells");
            std::set<Cell> cs;
            int len = -1;
            for (const auto& w : cells) {
                Cell c = parse_word(w.get<std::string>(), ctx);
                if (len < 0) len = static_cast<int>(c.size());
                if (static_cast<int>(c.size()) != len)
                    throw spec_error(ctx + ": element '" + label + "' mixes cell lengths");
                cs.insert(std::move(c));
            }
            if (len < 0) throw spec_error(ctx + ": element '" + label + "' is empty");
            elems.emplace_back(label, CylinderSet(system(ctx), start, len, std::move(cs)));
        }
        try {
            partitions_.emplace(name, Partition::make(system(ctx), std::move(elems)));
        } catch (const error& e) {
            throw spec_error(ctx + ": " + e.what());
        }
        partition_blocks_[name] = block;
    }

    void parse_cylinder(const std::string& name, const nlohmann::json& block) {
        const std::string ctx = "cylinders." + name;
        int start = specdetail::get_int(block, "start", 0, ctx);
        std::set<Cell> cs;
        int len = -1;
        for (const auto& w : specdetail::need(block, "cells", ctx)) {
            Cell c = parse_word(w.get<std::string>(), ctx);
            if (len < 0) len = static_cast<int>(c.size());
            if (static_cast<int>(c.size()) != len)
                throw spec_error(ctx + ": cells must share one length");
            cs.insert(std::move(c));
        }
        if (len < 0) throw spec_error(ctx + ": no cells");
        cylinders_.emplace(name, CylinderSet(system(ctx), start, len, std::move(cs)));
        cylinder_blocks_[name] = block;
    }

    // ---- task runners ----

    static double unit(double nats, bool bits) { return bits ? nats / std::log(2.0) : nats; }

    void run_entropy(const nlohmann::json& task, bool bits, int depth_override,
                     TaskOutput& out) const {
        const std::string ctx = "task entropy";
        const Measure& mu = measure(task, "measure", ctx);
        const Partition& xi = partition(task, ctx);
        int depth = task_depth(task, "depth", 6, depth_override, ctx);
        if (depth < 1) throw spec_error(ctx + ": depth must be >= 1");
        EntropyReport rep = entropy_rate(mu, xi, depth);

        std::ostringstream csv;
        csv << "n,H,increment,rate\n";
        for (std::size_t i = 0; i < rep.H.size(); ++i)
            csv << (i + 1) << "," << specdetail::fmt(unit(rep.H[i].nats, bits)) << ","
                << specdetail::fmt(unit(rep.increments[i].nats, bits)) << ","
                << specdetail::fmt(unit(rep.rates[i], bits)) << "\n";
        out.csv = csv.str();
        out.summary["rate"] = unit(rep.rates.back(), bits);
        out.summary["stabilized"] = rep.stabilized;
        out.summary["stabilized_from"] = rep.stabilized_from;
        out.summary["invariant"] = rep.invariant_measure;
        out.summary["unit"] = bits ? "bits" : "nats";
        out.summary["mode"] = rep.mode == ScalarMode::Rational ? "rational" : "float";
        out.summary["depth"] = depth;
    }

    void run_isomorphism(const nlohmann::json& task, int depth_override, TaskOutput& out) const {
        const std::string ctx = "task isomorphism";
        const Measure& mu = measure(task, "measure", ctx);
        std::vector<CylinderSet> gens = generators(task, "generators", depth_override, ctx);
        checked_depth(static_cast<int>(gens.size()), ctx);
        IntervalMap im = interval_map(mu, gens);

        std::ostringstream csv;
        csv << "word,lo,hi,lo_dec,hi_dec\n";
        std::uint64_t zero_cells = 0;
        for (const IntervalEntry& e : im.entries) {
            if (e.lo == e.hi) ++zero_cells;
            csv << e.word << "," << e.lo.str() << "," << e.hi.str() << ","
                << specdetail::fmt(e.lo.value()) << "," << specdetail::fmt(e.hi.value()) << "\n";
        }
        out.csv = csv.str();
        out.summary["words"] = im.entries.size();
        out.summary["zero_cells"] = zero_cells;
        out.summary["total"] = im.total().str();
    }

    void run_conditional(const nlohmann::json& task, bool bits, int depth_override,
                         TaskOutput& out) const {
        const std::string ctx = "task conditional";
        const Measure& mu = measure(task, "measure", ctx);
        const Partition& xi = partition(task, ctx);
        int depth = task_depth(task, "depth", 3, depth_override, ctx);
        ConditionalSystem cs = disintegrate(mu, xi, depth);

        std::ostringstream csv;
        csv << "element,factor,cell,weight,weight_dec\n";
        for (const ConditionalSlice& s : cs.slices)
            for (const auto& [cell, w] : s.conditional.table_weights())
                csv << s.label << "," << s.weight.str() << "," << cell_label(mu.system(), cell)
                    << "," << w.str() << "," << specdetail::fmt(w.value()) << "\n";
        out.csv = csv.str();

        // residual of the disintegration identity over every depth cell
        Scalar residual = Scalar::zero(mu.mode());
        for (const Cell& w : mu.system()->admissible_cells(cs.window_start, cs.window_len)) {
            CylinderSet e = CylinderSet::cylinder(mu.system(), cs.window_start, w);
            Scalar recombined = Scalar::zero(mu.mode());
            for (const ConditionalSlice& s : cs.slices)
                recombined += s.weight * s.conditional(intersect(e, s.element));
            Scalar diff = recombined - mu(e);
            if (diff.sign() < 0) diff = -diff;
            if (residual < diff) residual = diff;
        }
        out.summary["residual"] = residual.str();
        nlohmann::json factors = nlohmann::json::object();
        for (const ConditionalSlice& s : cs.slices) factors[s.label] = s.weight.str();
        out.summary["factor"] = factors;
        out.summary["dropped"] = cs.dropped;
        out.summary["depth"] = depth;
        // per-element information content of the conditional tables
        nlohmann::json info = nlohmann::json::object();
        for (const ConditionalSlice& s : cs.slices) {
            double h = 0;
            for (const auto& [cell, w] : s.conditional.table_weights())
                if (!w.is_zero()) h -= w.value() * std::log(w.value());
            info[s.label] = unit(h, bits);
        }
        out.summary["conditional_information"] = info;
    }

    void run_decompose(const nlohmann::json& task, int depth_override, TaskOutput& out) const {
        const std::string ctx = "task decompose";
        const Measure& mu = measure(task, "measure", ctx);
        const Partition& xi = partition(task, ctx);
        int depth = task_depth(task, "depth", 4, depth_override, ctx);
        if (depth < 1) throw spec_error(ctx + ": depth must be >= 1");
        TailEntropyReport rep = tail_zero_entropy_check(mu, xi, depth);

        std::ostringstream csv;
        csv << "element,weight,weight_dec,sets\n";
        nlohmann::json elements = nlohmann::json::array();
        for (int i = 0; i < rep.hull.size(); ++i) {
            Scalar w = mu(rep.hull.element(i));
            // hull elements are exactly invariant, so the description can be
            // re-anchored at coordinate 0
            CylinderSet c = rep.hull.element(i).normalized();
            if (c.len() > 0) {
                CylinderSet anchored(mu.system(), 0, c.len(), c.cells());
                if (anchored == c) c = anchored.normalized();
            }
            std::string desc = c.describe();
            csv << rep.hull.label(i) << "," << w.str() << "," << specdetail::fmt(w.value()) << ","
                << desc << "\n";
            elements.push_back({{"label", rep.hull.label(i)}, {"weight", w.str()}, {"set", desc}});
        }
        out.csv = csv.str();
        out.summary["pi"] = elements;
        out.summary["tail_zero_entropy"] = rep.pass;
        out.summary["depth"] = depth;
    }

    void run_rn(const nlohmann::json& task, int depth_override, TaskOutput& out) const {
        const std::string ctx = "task rn";
        const Measure& nu = measure(task, "numerator", ctx);
        const Measure& mu = measure(task, "denominator", ctx);
        int depth = task_depth(task, "depth", 3, depth_override, ctx);
        if (depth < 1) throw spec_error(ctx + ": depth must be >= 1");
        auto [ac, sing] = rn_decompose(nu, mu, depth);
        std::optional<DensityTable> density;
        if (sing.total().is_zero()) density = rn_derivative(nu, mu, depth);

        std::ostringstream csv;
        csv << "cell,nu,mu,density,density_dec\n";
        for (const Cell& w : mu.system()->admissible_cells(0, depth)) {
            CylinderSet c = CylinderSet::cylinder(mu.system(), 0, w);
            Scalar nv = nu(c), mv = mu(c);
            std::string d = "-", dd = "-";
            if (!mv.is_zero()) {
                Scalar ratio = nv / mv;
                d = ratio.str();
                dd = specdetail::fmt(ratio.value());
            }
            csv << cell_label(mu.system(), w) << "," << nv.str() << "," << mv.str() << "," << d
                << "," << dd << "\n";
        }
        out.csv = csv.str();
        out.summary["depth"] = depth;
        out.summary["ac_mass"] = ac.total().str();
        out.summary["sing_mass"] = sing.total().str();
        out.summary["absolutely_continuous"] = sing.total().is_zero();
        if (density) {
            Scalar recon = Scalar::zero(mu.mode());
            for (const auto& [cell, v] : density->values)
                recon += v * mu(CylinderSet::cylinder(mu.system(), 0, cell));
            out.summary["reconstruction"] = recon.str();
            if (depth >= 2) {
                // reported diagnostic: the density is algebra-relative, so
                // only its drift between consecutive depths is meaningful
                DensityTable coarse = rn_derivative(nu, mu, depth - 1);
                double drift = 0;
                for (const auto& [cell, v] : density->values) {
                    auto it = coarse.values.find(cell.substr(0, cell.size() - 1));
                    if (it != coarse.values.end())
                        drift = std::max(drift, std::abs(v.value() - it->second.value()));
                }
                out.summary["density_depth_drift"] = specdetail::fmt(drift);
            }
        }
    }

    void run_pesin(const nlohmann::json& task, TaskOutput& out) const {
        const std::string ctx = "task pesin";
        const nlohmann::json& rows = specdetail::need(task, "matrix", ctx);
        std::vector<std::vector<long long>> m;
        for (const auto& row : rows) {
            std::vector<long long> r;
            for (const auto& x : row) {
                if (!x.is_number_integer()) throw spec_error(ctx + ": matrix entries must be integers");
                r.push_back(x.get<long long>());
            }
            m.push_back(std::move(r));
        }
        ToralSystem sys = toral_automorphism(std::move(m));
        ExponentSpectrum spec = lyapunov_spectrum(sys);
        PesinResult pesin = pesin_check(sys);

        std::ostringstream csv;
        csv << "exponent,multiplicity\n";
        nlohmann::json exps = nlohmann::json::array();
        for (const ExponentEntry& e : spec.entries) {
            csv << specdetail::fmt(e.chi) << "," << e.multiplicity << "\n";
            exps.push_back({{"chi", e.chi}, {"multiplicity", e.multiplicity}});
        }
        out.csv = csv.str();
        out.summary["exponents"] = exps;
        out.summary["h_haar"] = pesin.h_haar;
        out.summary["positive_sum"] = pesin.positive_sum;
        out.summary["equal"] = pesin.equal;
        out.summary["ruelle_at_zero"] = ruelle_check(sys, 0.0).holds;
    }

    void run_square_chart(const nlohmann::json& task, int depth_override, TaskOutput& out) const {
        const std::string ctx = "task square-chart";
        const Measure& mu = measure(task, "measure", ctx);
        std::vector<CylinderSet> xg = generators(task, "x_generators", depth_override, ctx);
        std::vector<CylinderSet> yg =
            task.contains("y_generators") ? generators(task, "y_generators", depth_override, ctx)
                                          : std::vector<CylinderSet>{};
        int m = specdetail::get_int(task, "m", static_cast<int>(xg.size()), ctx);
        int k = specdetail::get_int(task, "k", static_cast<int>(yg.size()), ctx);
        checked_depth(m, ctx);
        checked_depth(k, ctx);
        SquareChart chart = square_chart(mu, xg, yg, m, k);

        std::ostringstream csv;
        csv << "column,fiber,x0,x1,y0,y1,x0_dec,x1_dec,y0_dec,y1_dec\n";
        for (const ChartRect& r : chart.rects)
            csv << r.column << "," << r.fiber << "," << r.x0.str() << "," << r.x1.str() << ","
                << r.y0.str() << "," << r.y1.str() << "," << specdetail::fmt(r.x0.value()) << ","
                << specdetail::fmt(r.x1.value()) << "," << specdetail::fmt(r.y0.value()) << ","
                << specdetail::fmt(r.y1.value()) << "\n";
        out.csv = csv.str();
        out.summary["m"] = chart.m;
        out.summary["k"] = chart.k;
        out.summary["rects"] = chart.rects.size();
        out.summary["area"] = chart.area().str();
        if (k >= 1 && m >= 2) {
            // reported diagnostic: one-step drift of the first fiber's
            // conditional density as the column depth grows
            nlohmann::json deltas = nlohmann::json::array();
            for (double d : phi_convergence(mu, xg, yg.front(), m))
                deltas.push_back(specdetail::fmt(d));
            out.summary["phi_convergence"] = deltas;
        }
    }

    void run_peano(const nlohmann::json& task, int depth_override, TaskOutput& out) const {
        const std::string ctx = "task peano";
        int depth = task_depth(task, "depth", 3, depth_override, ctx);
        if (depth < 1) throw spec_error(ctx + ": depth must be >= 1");
        if (depth > 10) throw depth_error(ctx + ": peano depth beyond 10 is not plottable");
        auto tiles = peano_tiles(depth);

        std::ostringstream csv;
        csv << "index,t0,t1,x,y,side\n";
        BigRational quarter(1, BigInt(1) << (2 * depth));
        for (const PeanoSquare& sq : tiles) {
            BigRational t0 = BigRational(sq.index) * quarter;
            BigRational t1 = BigRational(sq.index + 1) * quarter;
            csv << sq.index << "," << Scalar::rational(t0).str() << ","
                << Scalar::rational(t1).str() << "," << sq.x0().str() << "," << sq.y0().str()
                << "," << sq.side().str() << "\n";
        }
        out.csv = csv.str();
        out.summary["depth"] = depth;
        out.summary["cells"] = tiles.size();
        out.summary["cell_area"] = (Scalar::rational(quarter)).str();
    }

    ScalarMode mode_ = ScalarMode::Rational;
    RunLimits limits_;
    SystemPtr system_;
    std::map<std::string, Measure> measures_;
    std::map<std::string, Partition> partitions_;
    std::map<std::string, CylinderSet> cylinders_;
    std::vector<nlohmann::json> tasks_;
    nlohmann::json measure_blocks_ = nlohmann::json::object();
    nlohmann::json partition_blocks_ = nlohmann::json::object();
    nlohmann::json cylinder_blocks_ = nlohmann::json::object();
};

} // namespace ergo
