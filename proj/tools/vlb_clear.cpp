// Clears a scenario document and prints the report.
//
//   vlb_clear --scenario fixtures/table1.json --mode vlb --format table
//   vlb_clear --scenario fixtures/table4.json --compare ideal,split_end_level,vlb
//
// Exit codes: 0 ok, 2 invalid input, 3 infeasible, 4 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>

#include "vlb/errors.hpp"
#include "vlb/model.hpp"
#include "vlb/report.hpp"
#include "vlb/runner.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw vlb::ValidationError(std::vector<vlb::Diagnostic>{{path, "cannot open scenario file"}});
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string file_name_for(const std::string& tag)
{
    std::string out;
    for (char c : tag) {
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ? c : '_';
    }
    return out + ".lp";
}

std::vector<vlb::Mode> parse_modes(const std::string& list)
{
    std::vector<vlb::Mode> modes;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            modes.push_back(vlb::mode_from_string(item));
        }
    }
    return modes;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Market clearing with non-merchant storage"};
    std::string scenario_path, mode, compare_list, selection = "point", dump_dir, format = "table", out_path;
    bool no_ranges = false;
    app.add_option("--scenario", scenario_path, "scenario document (JSON)")->required();
    app.add_option("--mode", mode, "ideal, split_end_level, split_penalty or vlb (default: the scenario's)");
    app.add_option("--compare", compare_list, "comma separated modes to run side by side");
    app.add_option("--price-selection", selection, "point, range_min or range_max");
    app.add_flag("--no-price-ranges", no_ranges, "skip the dual range computation");
    app.add_option("--dump-lp", dump_dir, "write every clearing LP to this directory");
    app.add_option("--format", format, "table or structured");
    app.add_option("--out", out_path, "write the report here instead of standard output");
    CLI11_PARSE(app, argc, argv);

    try {
        vlb::Scenario scenario = vlb::parse_scenario(read_file(scenario_path));
        vlb::RunOptions options;
        options.selection = vlb::price_selection_from_string(selection);
        options.price_ranges = !no_ranges;
        const auto fmt = vlb::report_format_from_string(format);

        std::mutex dump_mutex;
        if (!dump_dir.empty()) {
            fs::create_directories(dump_dir);
            options.lp_observer = [&](const std::string& tag, const vlb::lp::LinearProgram& lp) {
                std::lock_guard lock(dump_mutex);
                std::ofstream f(fs::path(dump_dir) / file_name_for(tag));
                vlb::lp::write_lp_text(lp, f);
            };
        }

        vlb::RunReport report;
        if (!compare_list.empty()) {
            report = vlb::compare(scenario, parse_modes(compare_list), options);
        }
        else {
            if (!mode.empty()) {
                scenario.mode = vlb::mode_from_string(mode);
            }
            report = vlb::run(scenario, options);
        }

        const std::string doc = vlb::emit(report, fmt);
        if (out_path.empty()) {
            std::cout << doc;
        }
        else {
            std::ofstream f(out_path, std::ios::binary);
            f << doc;
        }
        for (const auto& m : report.modes) {
            if (m.failure) {
                std::cerr << "vlb_clear: " << vlb::to_string(m.mode) << ": " << m.failure->message << "\n";
            }
        }
        return vlb::exit_code_for(report);
    }
    catch (const vlb::ValidationError& e) {
        std::cerr << "vlb_clear: invalid scenario:\n";
        for (const auto& d : e.diagnostics()) {
            std::cerr << "  " << d.path << ": " << d.message << "\n";
        }
        return 2;
    }
    catch (const std::invalid_argument& e) {
        std::cerr << "vlb_clear: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception& e) {
        std::cerr << "vlb_clear: " << e.what() << "\n";
        return vlb::exit_code_for(e);
    }
}
