#include "wirange/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace wirange {

namespace {

using json = nlohmann::json;

constexpr int spectrogram_format_version = 1;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

void write_f32(std::ofstream& out, float v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void write_spectrogram(const Spectrogram& spec, const std::string& stem) {
  spec.validate();
  json hdr;
  hdr["format"] = spectrogram_format_version;
  hdr["kind"] = to_string(spec.kind);
  hdr["n_times"] = spec.n_times();
  hdr["n_freqs"] = spec.n_freqs();
  hdr["f0"] = spec.freqs.empty() ? 0.0 : spec.freqs.front();
  hdr["df"] = spec.freq_spacing();
  hdr["t0"] = spec.times.empty() ? 0.0 : spec.times.front();
  hdr["dt"] = spec.time_spacing();
  save_json(hdr, stem + ".json");

  std::ofstream out(stem + ".bin", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + stem + ".bin");
  if (spec.kind == SpecKind::intensity) {
    for (double v : spec.values.data) write_f32(out, static_cast<float>(v));
  } else {
    for (const cplx& z : spec.cvalues.data) {
      write_f32(out, static_cast<float>(z.real()));
      write_f32(out, static_cast<float>(z.imag()));
    }
  }
}

Spectrogram read_spectrogram(const std::string& stem) {
  const json hdr = load_json(stem + ".json");
  Spectrogram spec;
  const std::string kind = hdr.at("kind").get<std::string>();
  if (kind == "complex") spec.kind = SpecKind::complex_amp;
  else if (kind == "intensity") spec.kind = SpecKind::intensity;
  else throw std::runtime_error("spectrogram header: unknown kind " + kind);
  const auto n = hdr.at("n_times").get<std::size_t>();
  const auto k = hdr.at("n_freqs").get<std::size_t>();
  const double f0 = hdr.at("f0").get<double>();
  const double df = hdr.at("df").get<double>();
  const double t0 = hdr.at("t0").get<double>();
  const double dt = hdr.at("dt").get<double>();
  spec.freqs.resize(k);
  for (std::size_t i = 0; i < k; ++i) spec.freqs[i] = f0 + df * static_cast<double>(i);
  spec.times.resize(n);
  for (std::size_t i = 0; i < n; ++i) spec.times[i] = t0 + dt * static_cast<double>(i);

  std::ifstream in(stem + ".bin", std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + stem + ".bin");
  const std::size_t n_vals = n * k * (spec.kind == SpecKind::complex_amp ? 2 : 1);
  std::vector<float> buf(n_vals);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(n_vals * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != n_vals * sizeof(float))
    throw std::runtime_error("spectrogram data truncated: " + stem + ".bin");
  if (spec.kind == SpecKind::intensity) {
    spec.values = Matrix<double>(n, k);
    for (std::size_t i = 0; i < n * k; ++i) spec.values.data[i] = buf[i];
  } else {
    spec.cvalues = Matrix<cplx>(n, k);
    for (std::size_t i = 0; i < n * k; ++i)
      spec.cvalues.data[i] = cplx(buf[2 * i], buf[2 * i + 1]);
  }
  return spec;
}

void write_spectrogram_csv(const Spectrogram& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "time";
  for (double f : spec.freqs) out << "," << fmt(f);
  out << "\n";
  for (std::size_t n = 0; n < spec.n_times(); ++n) {
    out << fmt(spec.times[n]);
    for (std::size_t k = 0; k < spec.n_freqs(); ++k) out << "," << fmt(spec.intensity_at(n, k));
    out << "\n";
  }
}

TimeSeries read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char riff[4], wave[4];
  std::uint32_t riff_size;
  in.read(riff, 4);
  in.read(reinterpret_cast<char*>(&riff_size), 4);
  in.read(wave, 4);
  if (!in || std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0)
    throw std::runtime_error("not a WAV file: " + path);

  std::uint16_t audio_format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  std::vector<char> data;
  while (in) {
    char id[4];
    std::uint32_t size;
    in.read(id, 4);
    in.read(reinterpret_cast<char*>(&size), 4);
    if (!in) break;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      std::vector<char> f(size);
      in.read(f.data(), size);
      std::memcpy(&audio_format, f.data(), 2);
      std::memcpy(&channels, f.data() + 2, 2);
      std::memcpy(&sample_rate, f.data() + 4, 4);
      std::memcpy(&bits, f.data() + 14, 2);
    } else if (std::memcmp(id, "data", 4) == 0) {
      data.resize(size);
      in.read(data.data(), size);
      break;
    } else {
      in.seekg(size + (size & 1u), std::ios::cur);
    }
  }
  if (channels != 1) throw std::runtime_error("WAV: single channel required");
  if (data.empty()) throw std::runtime_error("WAV: no data chunk");

  TimeSeries ts;
  ts.sample_rate = sample_rate;
  if (audio_format == 1 && bits == 16) {
    const std::size_t n = data.size() / 2;
    ts.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::int16_t v;
      std::memcpy(&v, data.data() + 2 * i, 2);
      ts.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (audio_format == 1 && bits == 32) {
    const std::size_t n = data.size() / 4;
    ts.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::int32_t v;
      std::memcpy(&v, data.data() + 4 * i, 4);
      ts.samples[i] = static_cast<double>(v) / 2147483648.0;
    }
  } else if (audio_format == 3 && bits == 32) {
    const std::size_t n = data.size() / 4;
    ts.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      float v;
      std::memcpy(&v, data.data() + 4 * i, 4);
      ts.samples[i] = v;
    }
  } else {
    throw std::runtime_error("WAV: unsupported format (PCM 16/32-bit or float32 only)");
  }
  return ts;
}

TimeSeries read_raw_float32(const std::string& path) {
  const json side = load_json(path + ".json");
  TimeSeries ts;
  ts.sample_rate = side.at("sample_rate").get<double>();
  ts.start_time = side.value("start_time", 0.0);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<float> buf(bytes / sizeof(float));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  ts.samples.assign(buf.begin(), buf.end());
  ts.validate();
  return ts;
}

void write_ground_truth(const GroundTruth& gt, const std::string& path) {
  json j;
  j["r_n"] = gt.ranges;
  j["beta_true"] = gt.beta_true;
  j["seed"] = gt.seed;
  save_json(j, path);
}

GroundTruth read_ground_truth(const std::string& path) {
  const json j = load_json(path);
  GroundTruth gt;
  gt.ranges = j.at("r_n").get<std::vector<double>>();
  gt.beta_true = j.at("beta_true").get<double>();
  gt.seed = j.at("seed").get<std::uint64_t>();
  return gt;
}

void write_likelihood_result(const LikelihoodResult& res, const std::string& json_path) {
  json j;
  j["free_parameter"] = to_string(res.free);
  j["candidates"] = res.candidates;
  j["loglik"] = json::array();
  j["partials"]["broadband"] = json::array();
  j["partials"]["tonal"] = json::array();
  for (std::size_t i = 0; i < res.candidates.size(); ++i) {
    const auto push = [&](const char* key, double v) {
      if (std::isfinite(v)) {
        if (std::string(key) == "loglik") j["loglik"].push_back(v);
        else j["partials"][key].push_back(v);
      } else {
        if (std::string(key) == "loglik") j["loglik"].push_back(nullptr);
        else j["partials"][key].push_back(nullptr);
      }
    };
    push("loglik", res.loglik[i]);
    push("broadband", res.loglik_broadband[i]);
    push("tonal", res.loglik_tonal[i]);
  }
  j["argmax"] = res.argmax_value;
  j["argmax_index"] = res.argmax_index;
  j["diagnostics"]["skipped_candidates"] = res.skipped_candidates;
  j["diagnostics"]["striations_used"] = res.striations_used;
  j["diagnostics"]["clamps"]["alpha_floor"] = res.clamps.alpha_floor;
  j["diagnostics"]["clamps"]["v_floor"] = res.clamps.v_floor;
  j["diagnostics"]["clamps"]["theta_floor"] = res.clamps.theta_floor;
  j["diagnostics"]["clamps"]["lambda_floor"] = res.clamps.lambda_floor;
  j["diagnostics"]["clamps"]["lambda_saturated"] = res.clamps.lambda_saturated;
  j["diagnostics"]["no_tonal_excess"] = res.clamps.no_tonal_excess;
  save_json(j, json_path);
}

void write_likelihood_csv(const LikelihoodResult& res, const std::string& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot write " + csv_path);
  out << "index,candidate,loglik,loglik_broadband,loglik_tonal,valid,striations\n";
  for (std::size_t i = 0; i < res.candidates.size(); ++i) {
    out << i << "," << fmt(res.candidates[i]) << ",";
    if (res.valid[i]) out << fmt(res.loglik[i]) << "," << fmt(res.loglik_broadband[i]) << ","
                          << fmt(res.loglik_tonal[i]);
    else out << ",,";
    out << "," << static_cast<int>(res.valid[i]) << "," << res.striations_used[i] << "\n";
  }
}

void write_rate_profile_csv(const RangeRateProfile& prof, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "time,range_m,rate_mps\n";
  for (std::size_t i = 0; i < prof.times.size(); ++i)
    out << fmt(prof.times[i]) << "," << fmt(prof.ranges[i]) << "," << fmt(prof.rates[i]) << "\n";
}

void write_rate_profile_json(const RangeRateProfile& prof, const std::string& path) {
  json j;
  j["times"] = prof.times;
  j["ranges"] = prof.ranges;
  j["rates"] = prof.rates;
  save_json(j, path);
}

RangeRateProfile read_rate_profile(const std::string& path) {
  RangeRateProfile prof;
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    const json j = load_json(path);
    prof.times = j.at("times").get<std::vector<double>>();
    prof.rates = j.at("rates").get<std::vector<double>>();
    if (j.contains("ranges")) prof.ranges = j.at("ranges").get<std::vector<double>>();
    return prof;
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("rate profile csv: empty");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string t, r, v;
    std::getline(ss, t, ',');
    std::getline(ss, r, ',');
    std::getline(ss, v, ',');
    prof.times.push_back(std::stod(t));
    prof.ranges.push_back(std::stod(r));
    prof.rates.push_back(std::stod(v));
  }
  return prof;
}

namespace {

std::vector<double> scalar_or_array(const json& v) {
  if (v.is_number()) return {v.get<double>()};
  return v.get<std::vector<double>>();
}

}  // namespace

SimConfig read_sim_config(const std::string& path) {
  const json j = load_json(path);
  SimConfig cfg;
  cfg.band_lo = j.at("band").at(0).get<double>();
  cfg.band_hi = j.at("band").at(1).get<double>();
  cfg.df = j.value("df", cfg.df);
  cfg.dt = j.value("dt", cfg.dt);
  cfg.duration = j.at("duration").get<double>();
  cfg.seed = j.value("seed", std::uint64_t{0});

  if (j.contains("noise")) {
    const json& n = j["noise"];
    if (n.contains("variance_per_bin"))
      cfg.noise.variance_per_bin = n["variance_per_bin"].get<std::vector<double>>();
    else
      cfg.noise.variance_per_bin = {n.value("variance", 1.0)};
  } else {
    cfg.noise.variance_per_bin = {1.0};
  }
  double noise_scalar = 0.0;
  for (double v : cfg.noise.variance_per_bin) noise_scalar += v;
  noise_scalar /= static_cast<double>(cfg.noise.variance_per_bin.size());

  const json& ch = j.at("channel");
  const std::string kind = ch.value("kind", "analytic_wi");
  if (kind == "analytic_wi") {
    cfg.channel.kind = ChannelKind::analytic_wi;
    cfg.channel.beta_true = ch.at("beta_true").get<double>();
    cfg.channel.delta_k_coeff = ch.value("delta_k_coeff", cfg.channel.delta_k_coeff);
    cfg.channel.modulation_depth = ch.value("modulation_depth", cfg.channel.modulation_depth);
    if (ch.contains("base_gain")) cfg.channel.base_gain = scalar_or_array(ch["base_gain"]);
  } else if (kind == "ideal_modes") {
    cfg.channel.kind = ChannelKind::ideal_modes;
    cfg.channel.depth = ch.value("depth", cfg.channel.depth);
    cfg.channel.sound_speed = ch.value("sound_speed", cfg.channel.sound_speed);
    cfg.channel.mode_count = ch.value("mode_count", cfg.channel.mode_count);
    cfg.channel.source_depth = ch.value("source_depth", cfg.channel.source_depth);
    cfg.channel.receiver_depth = ch.value("receiver_depth", cfg.channel.receiver_depth);
  } else {
    throw std::runtime_error("sim config: unknown channel kind " + kind);
  }

  const json& src = j.at("source");
  if (src.contains("tone_freqs"))
    cfg.source.tone_freqs = src["tone_freqs"].get<std::vector<double>>();
  if (src.contains("tone_mags")) {
    cfg.source.tone_mags = src["tone_mags"].get<std::vector<double>>();
  } else if (src.contains("tone_snr_db")) {
    const double mag =
        std::sqrt(std::pow(10.0, src["tone_snr_db"].get<double>() / 10.0) * noise_scalar);
    cfg.source.tone_mags.assign(cfg.source.tone_freqs.size(), mag);
  } else {
    cfg.source.tone_mags.assign(cfg.source.tone_freqs.size(), 0.0);
  }
  if (src.contains("broadband_sigma")) {
    cfg.source.broadband_sigma = scalar_or_array(src["broadband_sigma"]);
  } else if (src.contains("broadband_snr_db")) {
    cfg.source.broadband_sigma = {
        std::sqrt(std::pow(10.0, src["broadband_snr_db"].get<double>() / 10.0) * noise_scalar)};
  }
  const std::string policy = src.value("phase_policy", "iid");
  if (policy == "iid") cfg.source.phase_policy = PhasePolicy::iid_uniform;
  else if (policy == "fixed") cfg.source.phase_policy = PhasePolicy::fixed;
  else if (policy == "random_walk") cfg.source.phase_policy = PhasePolicy::random_walk;
  else throw std::runtime_error("sim config: unknown phase_policy " + policy);

  const json& tr = j.at("track");
  cfg.track.r_start = tr.at("r_start").get<double>();
  if (tr.contains("rate_profile")) {
    const json& rp = tr["rate_profile"];
    cfg.track.rate = RateProfile::sampled(rp.at("times").get<std::vector<double>>(),
                                          rp.at("rates").get<std::vector<double>>());
  } else if (tr.contains("rate_profile_file")) {
    const RangeRateProfile prof = read_rate_profile(tr["rate_profile_file"].get<std::string>());
    cfg.track.rate = RateProfile::sampled(prof.times, prof.rates);
  } else {
    cfg.track.rate = RateProfile::constant_rate(tr.at("rate").get<double>());
  }
  return cfg;
}

NoiseProfile read_noise_profile_json(const std::string& path) {
  const json j = load_json(path);
  NoiseProfile prof;
  if (j.is_array()) prof.variance_per_bin = j.get<std::vector<double>>();
  else prof.variance_per_bin = j.at("variance_per_bin").get<std::vector<double>>();
  prof.validate();
  return prof;
}

void write_noise_profile_json(const NoiseProfile& prof, const std::string& path) {
  json j;
  j["variance_per_bin"] = prof.variance_per_bin;
  save_json(j, path);
}

void write_striation_csv(const StriationGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "l,r_prime,f,value,bin_class\n";
  for (std::size_t l = 0; l < grid.n_striations(); ++l) {
    for (std::size_t j = 0; j < grid.broadband.cols; ++j)
      out << l << "," << fmt(grid.ref_ranges[l]) << "," << fmt(grid.broadband_freqs[j]) << ","
          << fmt(grid.broadband.at(l, j)) << ",broadband\n";
    for (std::size_t j = 0; j < grid.tonal.cols; ++j)
      out << l << "," << fmt(grid.ref_ranges[l]) << "," << fmt(grid.tonal_freqs[j]) << ","
          << fmt(grid.tonal.at(l, j)) << ",tonal\n";
  }
}

}  // namespace wirange
