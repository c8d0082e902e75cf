// eprsim: command line front end for the coincidence simulator.
//
//   eprsim simulate <scenario.json> [--counts-csv FILE]
//   eprsim stats <counts.csv|counts.json>
//   eprsim spectrum <scenario.json> --config x|y|z|Z
//   eprsim sweep <sweep.json>
//   eprsim dump <scenario.json> --config x|y|z|Z --what emissions|detections
//
// Reports go to stdout. Failures print {"error": {...}} on stderr and exit 1.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "epr/error.hpp"
#include "epr/io.hpp"
#include "epr/scenario.hpp"

namespace {

std::uint32_t config_index(const std::string& name) {
  if (name == "x") return 0;
  if (name == "y") return 1;
  if (name == "z") return 2;
  if (name == "Z") return 3;
  throw epr::ConfigError("--config must be one of x, y, z, Z");
}

int report_error(const std::string& kind, const std::string& message,
                 const epr::json& extra = epr::json::object()) {
  epr::json err = {{"kind", kind}, {"message", message}};
  err.update(extra);
  std::cerr << epr::json{{"error", err}}.dump() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo simulator and analysis toolkit for coincidence Bell tests"};
  app.require_subcommand(1);

  std::string scenario_file, counts_file, sweep_file, counts_csv, config_name = "x",
                                                                  what = "detections";

  auto* simulate = app.add_subcommand("simulate", "Run a scenario and print the JSON report");
  simulate->add_option("scenario", scenario_file, "Scenario JSON file")->required();
  simulate->add_option("--counts-csv", counts_csv, "Also write per-configuration counts CSV");

  auto* stats = app.add_subcommand("stats", "Compute Bell statistics from a counts file");
  stats->add_option("counts", counts_file, "Counts CSV or JSON file")->required();

  auto* spectrum = app.add_subcommand("spectrum", "Print the time-difference spectrum as CSV");
  spectrum->add_option("scenario", scenario_file, "Scenario JSON file")->required();
  spectrum->add_option("--config", config_name, "Configuration x, y, z or Z")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep and print a CSV table");
  sweep_cmd->add_option("sweep", sweep_file, "Sweep JSON file")->required();

  auto* dump = app.add_subcommand("dump", "Dump the emission or detection stream of one run");
  dump->add_option("scenario", scenario_file, "Scenario JSON file")->required();
  dump->add_option("--config", config_name, "Configuration x, y, z or Z");
  dump->add_option("--what", what, "emissions or detections")
      ->check(CLI::IsMember({"emissions", "detections"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what());
  }

  try {
    if (*simulate) {
      const auto result = epr::run_scenario(epr::load_scenario_file(scenario_file));
      if (!counts_csv.empty()) {
        std::ofstream out(counts_csv);
        if (!out) throw epr::InputError("cannot write '" + counts_csv + "'");
        epr::write_counts_csv(out, result);
      }
      std::cout << epr::to_json(result).dump(2) << '\n';
    } else if (*stats) {
      const auto counts = epr::load_counts_file(counts_file);
      auto j = epr::to_json(epr::make_bell_report(counts));
      j["counts"] = epr::to_json(counts);
      std::cout << j.dump(2) << '\n';
    } else if (*spectrum) {
      const auto s = epr::load_scenario_file(scenario_file);
      const auto index = config_index(config_name);
      epr::CoincidenceSpectrum total;
      for (int rep = 0; rep < s.repeats; ++rep) {
        const auto streams = epr::simulate_configuration(s, index, static_cast<std::uint32_t>(rep));
        auto part = epr::build_spectrum(streams.a, streams.b, s.window, s.spectrum_lo, s.spectrum_hi);
        if (total.counts.empty()) {
          total = std::move(part);
        } else {
          for (std::size_t k = 0; k < total.counts.size(); ++k) total.counts[k] += part.counts[k];
          total.total_pairs_considered += part.total_pairs_considered;
        }
      }
      epr::write_spectrum_csv(std::cout, total);
    } else if (*sweep_cmd) {
      const auto spec = epr::load_sweep_file(sweep_file);
      epr::write_sweep_csv(std::cout, spec, epr::sweep(spec));
    } else if (*dump) {
      const auto s = epr::load_scenario_file(scenario_file);
      const auto streams = epr::simulate_configuration(s, config_index(config_name), 0);
      if (what == "emissions") {
        epr::write_emissions_csv(std::cout, streams.emissions);
      } else {
        std::vector<epr::DetectionEvent> merged(streams.a);
        merged.insert(merged.end(), streams.b.begin(), streams.b.end());
        std::stable_sort(merged.begin(), merged.end(),
                         [](const auto& l, const auto& r) { return l.t < r.t; });
        epr::write_detections_csv(std::cout, merged);
      }
    }
  } catch (const epr::ParseError& e) {
    return report_error(e.kind(), e.what(),
                        {{"file", e.file()}, {"line", e.line()}, {"field", e.field()}});
  } catch (const epr::Error& e) {
    return report_error(e.kind(), e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
  return 0;
}
