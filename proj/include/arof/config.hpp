#pragma once
// Flat key=value configuration with dotted keys. Unknown keys are hard
// errors; every value is typed and validated on load. The canonical
// serialization (fixed key order, full precision) backs the config
// fingerprint embedded in reports.
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "arof/errors.hpp"
#include "arof/link.hpp"

namespace arof {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: " + key + ": '" + v + "' is not a number");
  return x;
}

inline long long to_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("config: " + key + ": '" + v + "' is not an integer");
  return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError("config: " + key + ": '" + v + "' is not on/off");
}

inline std::vector<std::pair<double, double>> to_pairs(const std::string& key,
                                                       const std::string& v) {
  std::vector<std::pair<double, double>> out;
  if (trim(v).empty()) return out;
  size_t pos = 0;
  while (pos <= v.size()) {
    const size_t comma = v.find(',', pos);
    const std::string item = trim(v.substr(pos, comma == std::string::npos ? comma : comma - pos));
    const size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("config: " + key + ": expected freq:value pairs, got '" + item + "'");
    out.emplace_back(to_double(key, trim(item.substr(0, colon))),
                     to_double(key, trim(item.substr(colon + 1))));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::string fmt_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt_pairs(const std::vector<std::pair<double, double>>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(v[i].first) + ":" + fmt_double(v[i].second);
  }
  return out;
}

}  // namespace detail

inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? nl : nl - pos);
    ++line_no;
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) + " is not key=value: '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: line " + std::to_string(line_no) + " has an empty key");
    if (kv.count(key)) throw ConfigError("config: duplicate key '" + key + "'");
    kv[key] = val;
  }
  return kv;
}

// Builds a LinkConfig from parsed keys (missing keys keep their defaults),
// rejects unknown keys, derives dependent fields and validates.
inline LinkConfig config_from_map(std::map<std::string, std::string> kv) {
  LinkConfig cfg;
  auto take = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    static thread_local std::string held;
    held = it->second;
    kv.erase(it);
    return &held;
  };
  auto dbl = [&](const char* key, double& into) {
    if (const auto* v = take(key)) into = detail::to_double(key, *v);
  };
  auto dbl_or_off = [&](const char* key, double& into, double off_value) {
    if (const auto* v = take(key)) into = *v == "off" ? off_value : detail::to_double(key, *v);
  };
  auto num = [&](const char* key, int& into) {
    if (const auto* v = take(key)) into = int(detail::to_int(key, *v));
  };
  auto bol = [&](const char* key, bool& into) {
    if (const auto* v = take(key)) into = detail::to_bool(key, *v);
  };
  auto str = [&](const char* key, std::string& into) {
    if (const auto* v = take(key)) into = *v;
  };

  dbl("ofdm.sc_spacing_hz", cfg.ofdm.sc_spacing_hz);
  num("ofdm.n_data_sc", cfg.ofdm.n_data_sc);
  num("ofdm.n_pilot", cfg.ofdm.n_pilot);
  num("ofdm.qam_order", cfg.ofdm.qam_order);
  dbl("ofdm.cp_fraction", cfg.ofdm.cp_fraction);
  num("ofdm.n_payload_symbols", cfg.ofdm.n_payload_symbols);
  dbl("ofdm.if_hz", cfg.ofdm.if_hz);

  dbl("laser1.center_freq_hz", cfg.laser1.center_freq_hz);
  dbl("laser1.linewidth_hz", cfg.laser1.linewidth_hz);
  dbl("laser1.freq_jitter_hz", cfg.laser1.freq_jitter_hz);
  dbl("laser1.drift_hz_per_s", cfg.laser1.drift_hz_per_s);
  dbl("laser1.power_mw", cfg.laser1.power_mw);
  dbl("laser2.linewidth_hz", cfg.laser2.linewidth_hz);
  dbl("laser2.freq_jitter_hz", cfg.laser2.freq_jitter_hz);
  dbl("laser2.drift_hz_per_s", cfg.laser2.drift_hz_per_s);
  dbl("laser2.power_mw", cfg.laser2.power_mw);

  dbl("link.carrier_separation_hz", cfg.carrier_separation_hz);
  str("link.fidelity", cfg.fidelity);
  if (const auto* v = take("link.seed")) {
    char* end = nullptr;
    cfg.seed = std::strtoull(v->c_str(), &end, 10);
    if (end == v->c_str() || *end != '\0')
      throw ConfigError("config: link.seed: '" + *v + "' is not an unsigned integer");
  }
  bol("link.phase_noise", cfg.phase_noise_on);
  bol("link.fo_jitter", cfg.fo_jitter_on);
  bol("link.dispersion", cfg.dispersion_on);
  bol("link.additive_noise", cfg.additive_noise_on);

  if (const auto* v = take("modulator.mode")) {
    if (*v == "ssb")
      cfg.modulator.mode = ModMode::ssb;
    else if (*v == "dsb")
      cfg.modulator.mode = ModMode::dsb;
    else
      throw ConfigError("config: modulator.mode must be ssb or dsb, got '" + *v + "'");
  }
  dbl("modulator.index", cfg.modulator.index);
  dbl("modulator.carrier_suppression_db", cfg.modulator.carrier_suppression_db);
  bol("modulator.nonlinear", cfg.modulator.nonlinear);

  dbl("optics.edfa_gain_db", cfg.edfa_gain_db);
  dbl_or_off("optics.edfa_nf_db", cfg.edfa_nf_db, -std::numeric_limits<double>::infinity());
  bol("optics.split_loss", cfg.split_loss_on);

  dbl("fiber.length_km", cfg.fiber.length_km);
  dbl("fiber.dispersion_ps_nm_km", cfg.fiber.dispersion_ps_nm_km);
  dbl("fiber.attenuation_db_km", cfg.fiber.attenuation_db_km);
  dbl("fiber.ref_wavelength_nm", cfg.fiber.ref_wavelength_nm);

  dbl("pda.responsivity_a_w", cfg.pda.responsivity_a_w);
  dbl("pda.wireless_loss_db", cfg.pda.wireless_loss_db);
  if (const auto* v = take("pda.power_points")) cfg.pda.power_points = detail::to_pairs("pda.power_points", *v);

  dbl_or_off("rx.snr_db", cfg.rx.rx_snr_db, std::numeric_limits<double>::infinity());
  dbl("rx.rf_source_freq_hz", cfg.rx.rf_source_freq_hz);
  dbl("rx.rf_source_linewidth_hz", cfg.rx.rf_source_linewidth_hz);
  dbl("rx.rf_source_jitter_hz", cfg.rx.rf_source_jitter_hz);
  num("rx.multiplier_factor", cfg.rx.multiplier_factor);
  dbl("rx.mixer_band_lo_hz", cfg.rx.mixer_band_lo_hz);
  dbl("rx.mixer_band_hi_hz", cfg.rx.mixer_band_hi_hz);
  dbl("rx.conversion_loss_db", cfg.rx.conversion_loss_db);
  dbl("rx.adc_rate_hz", cfg.rx.adc_rate_hz);
  num("rx.adc_bits", cfg.rx.adc_bits);
  if (const auto* v = take("rx.ripple_mask")) cfg.ripple_mask = detail::to_pairs("rx.ripple_mask", *v);

  dbl("dsp.max_fo_hz", cfg.dsp.max_fo_hz);
  dbl("dsp.sync_threshold", cfg.dsp.sync_threshold);
  num("dsp.smooth_window", cfg.dsp.smooth_window);

  dbl("sim.memory_cap_mb", cfg.sim.memory_cap_mb);
  num("sim.jobs", cfg.sim.jobs);
  num("sim.lead_symbols", cfg.sim.lead_symbols);
  num("sim.tail_symbols", cfg.sim.tail_symbols);

  if (!kv.empty()) {
    std::string bad;
    for (const auto& [k, v] : kv) bad += (bad.empty() ? "" : ", ") + k;
    throw ConfigError("config: unknown key(s): " + bad);
  }

  cfg.laser2.center_freq_hz = cfg.laser1.center_freq_hz - cfg.carrier_separation_hz;
  validate_link_config(cfg);
  return cfg;
}

// Effective configuration in canonical form: every key, fixed order, full
// precision. Identical LinkConfigs serialize to identical bytes.
inline std::string serialize_link_config(const LinkConfig& cfg) {
  using detail::fmt_double;
  std::string s;
  auto put = [&](const std::string& k, const std::string& v) { s += k + "=" + v + "\n"; };
  auto putd = [&](const std::string& k, double v) { put(k, fmt_double(v)); };
  auto puti = [&](const std::string& k, long long v) { put(k, std::to_string(v)); };
  auto putb = [&](const std::string& k, bool v) { put(k, v ? "on" : "off"); };
  putd("ofdm.sc_spacing_hz", cfg.ofdm.sc_spacing_hz);
  puti("ofdm.n_data_sc", cfg.ofdm.n_data_sc);
  puti("ofdm.n_pilot", cfg.ofdm.n_pilot);
  puti("ofdm.qam_order", cfg.ofdm.qam_order);
  putd("ofdm.cp_fraction", cfg.ofdm.cp_fraction);
  puti("ofdm.n_payload_symbols", cfg.ofdm.n_payload_symbols);
  putd("ofdm.if_hz", cfg.ofdm.if_hz);
  putd("laser1.center_freq_hz", cfg.laser1.center_freq_hz);
  putd("laser1.linewidth_hz", cfg.laser1.linewidth_hz);
  putd("laser1.freq_jitter_hz", cfg.laser1.freq_jitter_hz);
  putd("laser1.drift_hz_per_s", cfg.laser1.drift_hz_per_s);
  putd("laser1.power_mw", cfg.laser1.power_mw);
  putd("laser2.linewidth_hz", cfg.laser2.linewidth_hz);
  putd("laser2.freq_jitter_hz", cfg.laser2.freq_jitter_hz);
  putd("laser2.drift_hz_per_s", cfg.laser2.drift_hz_per_s);
  putd("laser2.power_mw", cfg.laser2.power_mw);
  putd("link.carrier_separation_hz", cfg.carrier_separation_hz);
  put("link.fidelity", cfg.fidelity);
  put("link.seed", std::to_string(cfg.seed));
  putb("link.phase_noise", cfg.phase_noise_on);
  putb("link.fo_jitter", cfg.fo_jitter_on);
  putb("link.dispersion", cfg.dispersion_on);
  putb("link.additive_noise", cfg.additive_noise_on);
  put("modulator.mode", cfg.modulator.mode == ModMode::dsb ? "dsb" : "ssb");
  putd("modulator.index", cfg.modulator.index);
  putd("modulator.carrier_suppression_db", cfg.modulator.carrier_suppression_db);
  putb("modulator.nonlinear", cfg.modulator.nonlinear);
  putd("optics.edfa_gain_db", cfg.edfa_gain_db);
  put("optics.edfa_nf_db", std::isinf(cfg.edfa_nf_db) && cfg.edfa_nf_db < 0
                               ? "off"
                               : fmt_double(cfg.edfa_nf_db));
  putb("optics.split_loss", cfg.split_loss_on);
  putd("fiber.length_km", cfg.fiber.length_km);
  putd("fiber.dispersion_ps_nm_km", cfg.fiber.dispersion_ps_nm_km);
  putd("fiber.attenuation_db_km", cfg.fiber.attenuation_db_km);
  putd("fiber.ref_wavelength_nm", cfg.fiber.ref_wavelength_nm);
  putd("pda.responsivity_a_w", cfg.pda.responsivity_a_w);
  putd("pda.wireless_loss_db", cfg.pda.wireless_loss_db);
  put("pda.power_points", detail::fmt_pairs(cfg.pda.power_points));
  put("rx.snr_db",
      std::isinf(cfg.rx.rx_snr_db) && cfg.rx.rx_snr_db > 0 ? "off" : fmt_double(cfg.rx.rx_snr_db));
  putd("rx.rf_source_freq_hz", cfg.rx.rf_source_freq_hz);
  putd("rx.rf_source_linewidth_hz", cfg.rx.rf_source_linewidth_hz);
  putd("rx.rf_source_jitter_hz", cfg.rx.rf_source_jitter_hz);
  puti("rx.multiplier_factor", cfg.rx.multiplier_factor);
  putd("rx.mixer_band_lo_hz", cfg.rx.mixer_band_lo_hz);
  putd("rx.mixer_band_hi_hz", cfg.rx.mixer_band_hi_hz);
  putd("rx.conversion_loss_db", cfg.rx.conversion_loss_db);
  putd("rx.adc_rate_hz", cfg.rx.adc_rate_hz);
  puti("rx.adc_bits", cfg.rx.adc_bits);
  put("rx.ripple_mask", detail::fmt_pairs(cfg.ripple_mask));
  putd("dsp.max_fo_hz", cfg.dsp.max_fo_hz);
  putd("dsp.sync_threshold", cfg.dsp.sync_threshold);
  puti("dsp.smooth_window", cfg.dsp.smooth_window);
  putd("sim.memory_cap_mb", cfg.sim.memory_cap_mb);
  puti("sim.jobs", cfg.sim.jobs);
  puti("sim.lead_symbols", cfg.sim.lead_symbols);
  puti("sim.tail_symbols", cfg.sim.tail_symbols);
  return s;
}

inline std::string config_fingerprint(const LinkConfig& cfg) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(serialize_link_config(cfg)));
  return buf;
}

inline LinkConfig load_link_config(const std::string& text,
                                   const std::map<std::string, std::string>& overrides = {}) {
  auto kv = parse_config_text(text);
  for (const auto& [k, v] : overrides) kv[k] = v;
  LinkConfig cfg = config_from_map(std::move(kv));
  cfg.fingerprint = config_fingerprint(cfg);
  return cfg;
}

}  // namespace arof
