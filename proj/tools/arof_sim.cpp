// Command-line front end for the link simulator: single runs, bandwidth and
// carrier-frequency sweeps, capture export and config validation. All results
// land in --out-dir and the primary artifact is echoed to stdout.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arof/config.hpp"
#include "arof/link.hpp"
#include "arof/report.hpp"
#include "arof/sweep.hpp"
#include "arof/waveform_io.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw arof::ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos <= csv.size()) {
    const size_t comma = csv.find(',', pos);
    const std::string item = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (!item.empty()) out.push_back(arof::detail::to_double("list", item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw arof::ConfigError("empty value list");
  return out;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::string fidelity;
  int64_t seed = -1;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool need_config = true) {
  auto* opt = cmd->add_option("--config", a.config_path, "configuration file");
  if (need_config) opt->required();
  cmd->add_option("--out-dir", a.out_dir, "output directory");
  cmd->add_option("--fidelity", a.fidelity, "equivalent_baseband or full_field");
  cmd->add_option("--seed", a.seed, "override link.seed");
  cmd->add_option("--set", a.sets, "key=value override, repeatable");
}

arof::LinkConfig load_cfg(const CommonArgs& a) {
  std::map<std::string, std::string> overrides;
  for (const auto& s : a.sets) {
    const size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw arof::ConfigError("--set expects key=value, got '" + s + "'");
    overrides[s.substr(0, eq)] = s.substr(eq + 1);
  }
  if (!a.fidelity.empty()) overrides["link.fidelity"] = a.fidelity;
  if (a.seed >= 0) overrides["link.seed"] = std::to_string(a.seed);
  return arof::load_link_config(slurp(a.config_path), overrides);
}

void ensure_dir(const std::string& d) {
  std::error_code ec;
  std::filesystem::create_directories(d, ec);
  if (ec) throw arof::FormatError("cannot create output directory " + d);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optical-heterodyne sub-THz link simulator"};
  app.require_subcommand(1);

  CommonArgs run_args, bw_args, freq_args, cap_args, val_args;
  bool dump_capture = false, dump_constellations = false;
  std::string spacings = "2e6,10e6,20e6,40e6";
  std::string freqs = "170e9,180e9,190e9,200e9,210e9,220e9,230e9,240e9,250e9,260e9";
  int n_seeds = 20;

  auto* run_cmd = app.add_subcommand("run", "single end-to-end run");
  add_common(run_cmd, run_args);
  run_cmd->add_flag("--dump-capture", dump_capture, "also write capture.arof + capture.json");
  run_cmd->add_flag("--constellations", dump_constellations, "also write constellations.csv");

  auto* bw_cmd = app.add_subcommand("sweep-bw", "EVM vs occupied bandwidth at constant TX power");
  add_common(bw_cmd, bw_args);
  bw_cmd->add_option("--spacings", spacings, "comma-separated subcarrier spacings, Hz");
  bw_cmd->add_option("--seeds", n_seeds, "seeds per sweep point");

  auto* freq_cmd = app.add_subcommand("sweep-freq", "EVM vs sub-THz signal frequency");
  add_common(freq_cmd, freq_args);
  freq_cmd->add_option("--freqs", freqs, "comma-separated signal centre frequencies, Hz");
  freq_cmd->add_option("--seeds", n_seeds, "seeds per sweep point");

  auto* cap_cmd = app.add_subcommand("dump-capture", "write the impaired capture and sidecar");
  add_common(cap_cmd, cap_args);

  auto* val_cmd = app.add_subcommand("validate-config", "parse and validate a configuration");
  add_common(val_cmd, val_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      auto cfg = load_cfg(run_args);
      ensure_dir(run_args.out_dir);
      const auto res = arof::run_link(cfg);
      const std::string json = arof::report_to_json(res, cfg).dump(2) + "\n";
      arof::write_text_file(run_args.out_dir + "/report.json", json);
      if (dump_constellations)
        arof::write_text_file(run_args.out_dir + "/constellations.csv",
                              arof::constellations_to_csv(res));
      if (dump_capture) {
        arof::write_capture(run_args.out_dir + "/capture.arof", res.capture);
        arof::write_text_file(run_args.out_dir + "/capture.json",
                              arof::capture_sidecar_json(res, cfg).dump(2) + "\n");
      }
      std::fputs(json.c_str(), stdout);
      return 0;
    }
    if (bw_cmd->parsed()) {
      auto cfg = load_cfg(bw_args);
      ensure_dir(bw_args.out_dir);
      const auto s = arof::sweep_bandwidth(cfg, parse_list(spacings), n_seeds);
      const std::string csv = arof::sweep_to_csv(s);
      arof::write_text_file(bw_args.out_dir + "/sweep_bandwidth.csv", csv);
      std::fputs(csv.c_str(), stdout);
      return 0;
    }
    if (freq_cmd->parsed()) {
      auto cfg = load_cfg(freq_args);
      ensure_dir(freq_args.out_dir);
      const auto s = arof::sweep_carrier(cfg, parse_list(freqs), n_seeds);
      const std::string csv = arof::sweep_to_csv(s);
      arof::write_text_file(freq_args.out_dir + "/sweep_frequency.csv", csv);
      std::fputs(csv.c_str(), stdout);
      return 0;
    }
    if (cap_cmd->parsed()) {
      auto cfg = load_cfg(cap_args);
      ensure_dir(cap_args.out_dir);
      const auto res = arof::run_link(cfg);
      arof::write_capture(cap_args.out_dir + "/capture.arof", res.capture);
      const std::string json = arof::capture_sidecar_json(res, cfg).dump(2) + "\n";
      arof::write_text_file(cap_args.out_dir + "/capture.json", json);
      std::fputs(json.c_str(), stdout);
      return 0;
    }
    if (val_cmd->parsed()) {
      auto cfg = load_cfg(val_args);
      arof::ojson j;
      j["status"] = "ok";
      j["config_fingerprint"] = cfg.fingerprint;
      j["fidelity"] = cfg.fidelity;
      j["signal_freq_hz"] = cfg.signal_freq_hz();
      j["raw_rate_bps"] = arof::compute_raw_rate(cfg.ofdm);
      std::fputs((j.dump(2) + "\n").c_str(), stdout);
      return 0;
    }
  } catch (const arof::ConfigError& e) {
    std::fputs((arof::error_json("config_error", e.what()).dump(2) + "\n").c_str(), stdout);
    return 1;
  } catch (const arof::BandError& e) {
    std::fputs((arof::error_json("band_error", e.what()).dump(2) + "\n").c_str(), stdout);
    return 1;
  } catch (const arof::FormatError& e) {
    std::fputs((arof::error_json("format_error", e.what()).dump(2) + "\n").c_str(), stdout);
    return 1;
  } catch (const std::exception& e) {
    std::fputs((arof::error_json("internal_error", e.what()).dump(2) + "\n").c_str(), stdout);
    return 1;
  }
  return 0;
}
