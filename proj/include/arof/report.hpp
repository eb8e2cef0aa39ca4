#pragma once
// Report serialization: run reports as ordered JSON, constellation dumps and
// capture sidecars. Key order is fixed so identical runs serialize to
// identical bytes.
#include <cstdio>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "arof/config.hpp"
#include "arof/link.hpp"

namespace arof {

using ojson = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

inline ojson report_to_json(const RunResult& r, const LinkConfig& cfg) {
  ojson j;
  j["schema_version"] = kReportSchemaVersion;
  j["status"] = r.report.status;
  j["fidelity"] = r.report.fidelity;
  j["seed"] = r.report.seed;
  j["config_fingerprint"] = r.report.config_fingerprint;
  j["evm_percent"] = r.report.evm_percent;
  j["pass_3gpp"] = r.report.pass_3gpp;
  j["ber"] = r.report.ber;
  j["n_bits"] = r.report.n_bits;
  j["n_bit_errors"] = r.report.n_bit_errors;
  ojson fo;
  fo["est_hz"] = r.report.fo_est_hz;
  fo["true_hz"] = r.report.fo_true_hz;
  fo["error_hz"] = r.report.fo_est_hz - r.report.fo_true_hz;
  fo["fractional_hz"] = r.report.fo_fractional_hz;
  fo["integer_bins"] = r.report.fo_integer_bins;
  j["fo"] = fo;
  ojson sync;
  sync["frame_start"] = r.report.frame_start;
  sync["metric"] = r.report.sync_metric;
  sync["timing_corr"] = r.report.timing_corr;
  j["sync"] = sync;
  ojson stages;
  for (const auto& [name, evm] : r.report.stage_evm) stages[name] = evm;
  j["stage_evm_percent"] = stages;
  j["cpe_rad"] = r.report.cpe_rad;
  ojson link;
  link["carrier_separation_hz"] = cfg.carrier_separation_hz;
  link["signal_freq_hz"] = cfg.signal_freq_hz();
  link["lo_freq_hz"] = cfg.lo_freq_hz();
  link["if_hz"] = cfg.ofdm.if_hz;
  link["raw_rate_bps"] = compute_raw_rate(cfg.ofdm);
  link["walkoff_ps"] = r.report.walkoff_ps;
  link["emitted_power_dbm"] = r.report.emitted_power_dbm;
  link["sim_rate_hz"] = r.report.sim_rate_hz;
  link["adc_rate_hz"] = r.report.adc_rate_hz;
  link["snr_effective_db"] = r.truth.snr_effective_db;
  j["link"] = link;
  return j;
}

// stage,symbol_index,subcarrier_index,re,im for every stored stage
inline std::string constellations_to_csv(const RunResult& r) {
  std::string out = "stage,symbol_index,subcarrier_index,re,im\n";
  char buf[160];
  for (const auto& [stage, sym_rows] : r.report.constellations) {
    for (size_t t = 0; t < sym_rows.size(); ++t) {
      for (size_t d = 0; d < sym_rows[t].size(); ++d) {
        const int k = r.meta.occupied[size_t(r.meta.data[d])];
        std::snprintf(buf, sizeof buf, "%s,%zu,%d,%.9g,%.9g\n", stage.c_str(), t, k,
                      sym_rows[t][d].real(), sym_rows[t][d].imag());
        out += buf;
      }
    }
  }
  return out;
}

inline ojson capture_sidecar_json(const RunResult& r, const LinkConfig& cfg) {
  ojson j;
  j["format"] = "arof-capture-v1";
  j["sample_rate_hz"] = r.capture.sample_rate_hz;
  j["ref_freq_hz"] = r.capture.ref_freq_hz;
  j["n_samples"] = r.capture.samples.size();
  j["if_hz"] = cfg.ofdm.if_hz;
  j["sc_spacing_hz"] = cfg.ofdm.sc_spacing_hz;
  j["fidelity"] = cfg.fidelity;
  j["seed"] = cfg.seed;
  j["config_fingerprint"] = cfg.fingerprint;
  j["fo_true_hz"] = r.truth.fo_composite_hz;
  j["walkoff_ps"] = r.truth.walkoff_ps;
  j["snr_effective_db"] = r.truth.snr_effective_db;
  return j;
}

inline ojson error_json(const std::string& type, const std::string& message) {
  ojson j;
  j["schema_version"] = kReportSchemaVersion;
  j["status"] = "error";
  j["error_type"] = type;
  j["message"] = message;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot open " + path + " for writing");
  f.write(content.data(), std::streamsize(content.size()));
  if (!f) throw FormatError("short write to " + path);
}

}  // namespace arof
