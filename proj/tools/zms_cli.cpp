// Copyright 2026 The ZMS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "runner.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kNumerical = 3 };

struct Overrides {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::string sampler;
  std::string summation;
};

void add_common(CLI::App* cmd, Overrides& o, bool needs_config) {
  auto* c = cmd->add_option("--config", o.config_path, "run configuration (JSON) or a previous manifest.json");
  if (needs_config) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out_dir, "output directory (overrides output_dir)");
  cmd->add_option("--seed", o.seed, "random seed (overrides config)");
  cmd->add_option("--samples", o.samples, "number of field sub-samples")->check(CLI::PositiveNumber);
  cmd->add_option("--sampler", o.sampler, "field sampler")->check(CLI::IsMember({"gh", "mc"}));
  cmd->add_option("--sum", o.summation, "sub-sample summation")->check(CLI::IsMember({"coherent", "incoherent"}));
}

zms::RunConfig apply(zms::RunConfig c, const Overrides& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.samples) c.n_samples = *o.samples;
  if (!o.sampler.empty()) c.sampler = zms::sampler_from_string(o.sampler);
  if (!o.summation.empty()) c.summation = zms::summation_from_string(o.summation);
  if (!o.out_dir.empty()) c.output_dir = o.out_dir;
  c.validate();
  return c;
}

void report_simulation(const zms::SimulationOutput& out, const std::string& dir) {
  std::cout << "wrote " << dir << "/traces.csv, peaks.csv, manifest.json (" << out.traces.size()
            << " storage times, " << out.wall_seconds << " s)\n";
  if (out.envelope)
    std::cout << "envelope: " << zms::to_string(out.envelope->model) << " tau = " << out.envelope->tau * 1e6
              << " us (r2 " << out.envelope->r_squared << ")\n";
  if (out.spectrum)
    for (const auto& p : out.spectrum->peaks)
      std::cout << "spectral peak: " << p.frequency / 1e3 << " kHz (amplitude " << p.amplitude << ")\n";
  if (!out.analysis_error.empty()) std::cout << "analysis: " << out.analysis_error << "\n";
}

int run_config(const std::string& mode, const zms::RunConfig& c, bool quiet) {
  const std::string dir = c.output_dir;
  if (mode == "classical" || (mode == "auto" && c.classical)) {
    const auto out = zms::classical(c);
    zms::write_classical(dir, c, out);
    if (!quiet)
      std::cout << "wrote " << dir << "/classical.csv, manifest.json; |M| 1/e time " << out.decay_time * 1e6
                << " us\n";
  } else if (mode == "sweep" || (mode == "auto" && c.sweep)) {
    const auto out = zms::sweep(c);
    zms::write_sweep(dir, c, out);
    if (!quiet) {
      for (const auto& r : out.rows) std::cout << r.b_gauss << " G: " << r.freq_hz / 1e3 << " kHz\n";
      if (out.fit)
        std::cout << "slope " << out.fit->slope / 1e6 << " MHz/G, r2 " << out.fit->r_squared << "\n";
    }
    if (!out.fit) throw zms::NumericalError("linear fit failed: " + out.fit_error);
  } else {
    const auto out = zms::simulate(c);
    zms::write_simulation(dir, c, out);
    if (!quiet) report_simulation(out, dir);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeeman-coherence light storage simulator"};
  app.set_version_flag("--version", zms::version());
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress progress output");

  Overrides sim_o, cls_o, swp_o, pre_o;
  auto* sim = app.add_subcommand("simulate", "run the ensemble storage simulation");
  add_common(sim, sim_o, true);
  auto* cls = app.add_subcommand("classical", "classical dipole trajectories");
  add_common(cls, cls_o, true);
  auto* swp = app.add_subcommand("sweep", "frequency versus field sweep with linear fit");
  add_common(swp, swp_o, true);

  auto* ana = app.add_subcommand("analyze", "envelope and spectrum of an existing CSV");
  std::string csv_path, ana_out;
  ana->add_option("csv", csv_path, "peaks.csv, traces.csv or sweep.csv")->required()->check(CLI::ExistingFile);
  ana->add_option("--out", ana_out, "write the analysis JSON to this file");

  auto* pre = app.add_subcommand("preset", "list, show or execute named configurations");
  std::string preset_name;
  bool dump = false;
  pre->add_option("name", preset_name, "preset name; omit to list");
  pre->add_flag("--dump", dump, "print the resolved config instead of running");
  add_common(pre, pre_o, false);

  for (auto* sub : {sim, cls, swp, ana, pre}) sub->add_flag("--quiet", quiet, "suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (sim->parsed()) return run_config("simulate", apply(zms::load_config(sim_o.config_path), sim_o), quiet);
    if (cls->parsed()) return run_config("classical", apply(zms::load_config(cls_o.config_path), cls_o), quiet);
    if (swp->parsed()) return run_config("sweep", apply(zms::load_config(swp_o.config_path), swp_o), quiet);
    if (ana->parsed()) {
      const std::string text = zms::to_json(zms::analyze_csv(csv_path)).dump(2);
      if (ana_out.empty()) {
        std::cout << text << '\n';
      } else {
        std::ofstream f(ana_out);
        if (!(f << text << '\n')) throw zms::IoError("cannot write '" + ana_out + "'");
      }
      return kOk;
    }
    if (pre->parsed()) {
      if (preset_name.empty()) {
        for (const auto& n : zms::preset_names()) std::cout << n << "  " << zms::preset_description(n) << '\n';
        return kOk;
      }
      const zms::RunConfig c = apply(zms::preset(preset_name), pre_o);
      if (dump) {
        std::cout << zms::to_json(c).dump(2) << '\n';
        return kOk;
      }
      return run_config("auto", c, quiet);
    }
  } catch (const zms::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const zms::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
