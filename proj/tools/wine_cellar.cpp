// wine-cellar: command-line front end for the wireless interconnect simulator.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "wine/config.hpp"
#include "wine/error.hpp"
#include "wine/harness.hpp"
#include "wine/report.hpp"

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "csv";
    bool force = false;
};

wine::ScenarioConfig load(const Options& o) {
    wine::json doc = o.config.empty() ? wine::json::object() : wine::read_config_file(o.config);
    if (o.seed) {
        if (!doc.is_object()) throw wine::config_error("config: top level must be an object");
        doc["seed"] = *o.seed;
    }
    return wine::make_config(doc);
}

// Without --out reports go to stdout, separated by a blank line; `report`
// falls back to the configured output directory.
void deliver(const Options& o, const std::vector<wine::SweepReport>& reports, const std::string& fallback_dir = {}) {
    const auto fmt_kind = wine::parse_format(o.format);
    const std::string dir = o.out.empty() ? fallback_dir : o.out;
    if (dir.empty()) {
        for (std::size_t i = 0; i < reports.size(); ++i) {
            if (reports[i].rows.empty())
                throw wine::domain_error(fmt::format("report '{}' has no rows", reports[i].name));
            std::cout << (i ? "\n" : "") << wine::render(reports[i], fmt_kind);
        }
        return;
    }
    for (const auto& p : wine::emit_reports(reports, fmt_kind, dir, o.force)) std::cerr << "wrote " << p.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wine-cellar: wireless-augmented HPC interconnect simulator"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "scenario config (JSON, merged over defaults)");
        sub->add_option("--seed", o.seed, "override the config seed");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--force", o.force, "overwrite reports from a different config");
    };
    auto* linkbudget = app.add_subcommand("linkbudget", "link-budget table");
    auto* layout = app.add_subcommand("layout", "rack, transceiver and IRS panel positions");
    auto* sweep_irs = app.add_subcommand("sweep-irs", "IRS spacing x room height sweep");
    auto* coordinate = app.add_subcommand("coordinate", "plan, assign and deploy the configured state");
    auto* simulate = app.add_subcommand("simulate", "coordination and wireless-fraction sweeps");
    auto* report = app.add_subcommand("report", "run every pipeline and write all reports");
    auto* config = app.add_subcommand("config", "print the effective config and its digest");
    for (auto* s : {linkbudget, layout, sweep_irs, coordinate, simulate, report, config}) common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const auto cfg = load(o);
        namespace h = wine::harness;
        if (linkbudget->parsed()) deliver(o, {h::run_linkbudget_table(cfg)});
        else if (layout->parsed()) deliver(o, {h::run_layout(cfg)});
        else if (sweep_irs->parsed()) deliver(o, {h::run_irs_sweep(cfg)});
        else if (coordinate->parsed()) deliver(o, h::run_coordinate(cfg));
        else if (simulate->parsed()) deliver(o, h::run_simulate(cfg));
        else if (report->parsed()) deliver(o, h::run_all(cfg), cfg.output_dir);
        else if (config->parsed()) {
            std::cout << cfg.document.dump(2) << "\n";
            std::cerr << "digest " << h::metadata_for(cfg).config_digest << "\n";
        }
        return 0;
    } catch (const wine::error& e) {
        std::cerr << "wine-cellar: " << e.what() << "\n";
        return wine::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "wine-cellar: internal error: " << e.what() << "\n";
        return 1;
    }
}
