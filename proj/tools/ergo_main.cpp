// Command-line front end.
//
//   ergo run <spec> -o <dir>       one CSV + one JSON artifact per task
//   ergo plotdata <spec> --task t  CSV plot data on stdout
//
// Exit codes: 0 success, 2 parse error, 3 semantic error, 4 depth limit.

#include <CLI11.hpp>

#include <ergo/runspec.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

struct Options {
    std::string spec_path;
    std::string out_dir;
    std::string mode = "rational";
    std::string task;
    int depth = -1;
    int max_depth = 16;
    bool bits = false;
    bool dump_normalized = false;
};

ergo::ScalarMode parse_mode(const std::string& mode) {
    if (mode == "rational") return ergo::ScalarMode::Rational;
    if (mode == "float") return ergo::ScalarMode::Floating;
    throw ergo::spec_error("--mode must be 'rational' or 'float'");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ergo::error("cannot write " + path.string());
    out << content;
}

int cmd_run(const Options& opt) {
    ergo::RunLimits limits{opt.max_depth};
    ergo::RunSpec spec = ergo::RunSpec::from_file(opt.spec_path, parse_mode(opt.mode), limits);
    if (opt.dump_normalized) {
        std::cout << spec.normalized().dump(2) << "\n";
        return 0;
    }
    std::filesystem::create_directories(opt.out_dir);
    for (const ergo::TaskOutput& t : spec.run_all(opt.bits)) {
        write_file(std::filesystem::path(opt.out_dir) / (t.name + ".csv"), t.csv);
        write_file(std::filesystem::path(opt.out_dir) / (t.name + ".json"),
                   t.summary.dump(2) + "\n");
    }
    return 0;
}

int cmd_plotdata(const Options& opt) {
    ergo::RunLimits limits{opt.max_depth};
    ergo::RunSpec spec = ergo::RunSpec::from_file(opt.spec_path, parse_mode(opt.mode), limits);
    static const std::set<std::string> plottable{"isomorphism", "square-chart", "peano"};
    if (!plottable.count(opt.task) && opt.task.empty())
        throw ergo::spec_error("plotdata: --task required");
    for (const nlohmann::json& task : spec.tasks()) {
        std::string type = task.at("type").get<std::string>();
        std::string name = task.contains("name") ? task.at("name").get<std::string>() : type;
        if (type != opt.task && name != opt.task) continue;
        if (!plottable.count(type))
            throw ergo::spec_error("plotdata: task '" + opt.task + "' is not a plot task " +
                                   "(isomorphism, square-chart, peano)");
        ergo::TaskOutput out = spec.run_task(task, opt.bits, opt.depth);
        std::cout << out.csv;
        return 0;
    }
    throw ergo::spec_error("plotdata: no task named or typed '" + opt.task + "' in the spec");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact measurable-partition computations on shift spaces"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* run = app.add_subcommand("run", "execute every task in a spec file");
    run->add_option("spec", opt.spec_path, "TOML or JSON spec file")->required();
    run->add_option("-o,--output", opt.out_dir, "output directory")->required();
    run->add_flag("--dump-normalized", opt.dump_normalized,
                  "print the normalized JSON spec and exit");

    CLI::App* plot = app.add_subcommand("plotdata", "emit plot CSV for one task on stdout");
    plot->add_option("spec", opt.spec_path, "TOML or JSON spec file")->required();
    plot->add_option("--task", opt.task, "task name or type")->required();
    plot->add_option("--depth", opt.depth, "override the task's depth");

    for (CLI::App* sub : {run, plot}) {
        sub->add_option("--mode", opt.mode, "scalar mode: rational (default) or float");
        sub->add_flag("--bits", opt.bits, "report entropies in bits instead of nats");
        sub->add_option("--max-depth", opt.max_depth, "depth limit (default 16)");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(opt);
        return cmd_plotdata(opt);
    } catch (const ergo::toml::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const ergo::depth_error& e) {
        std::cerr << "depth limit: " << e.what() << "\n";
        return 4;
    } catch (const ergo::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
