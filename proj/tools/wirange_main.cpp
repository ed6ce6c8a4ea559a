#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "wirange/baselines.hpp"
#include "wirange/bench.hpp"
#include "wirange/inference.hpp"
#include "wirange/io.hpp"
#include "wirange/spectral.hpp"
#include "wirange/striation.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace wirange;

namespace {

constexpr const char* tool_version = "0.1.0";

struct CommonFlags {
  std::string config;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> grid;       // MIN:MAX:STEP
  std::optional<double> beta;
  std::optional<double> rate;
  std::optional<std::string> rate_profile;
  std::optional<std::string> band;       // FMIN:FMAX
  std::optional<std::string> tones;      // f1,f2,...
  std::string method = "G";
  int l_min = 30;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* copt = cmd->add_option("--config", f.config, "JSON configuration file");
  if (config_required) copt->required();
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--seed", f.seed, "RNG seed override");
  cmd->add_option("--grid", f.grid, "candidate grid MIN:MAX:STEP");
  cmd->add_option("--beta", f.beta, "waveguide invariant override");
  cmd->add_option("--rate", f.rate, "constant range rate override (m/s)");
  cmd->add_option("--rate-profile", f.rate_profile, "range-rate profile file (csv/json)");
  cmd->add_option("--band", f.band, "processed band FMIN:FMAX (Hz)");
  cmd->add_option("--tones", f.tones, "comma-separated tonal frequencies (Hz)");
  cmd->add_option("--method", f.method, "estimation method: G, S or T");
  cmd->add_option("--l-min", f.l_min, "minimum striation count (default 30)");
  cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(std::stod(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

struct GridSpec {
  double min, max, step;
};

GridSpec parse_grid(const std::string& s) {
  const auto c1 = s.find(':');
  const auto c2 = s.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("grid must be MIN:MAX:STEP");
  GridSpec g{std::stod(s.substr(0, c1)), std::stod(s.substr(c1 + 1, c2 - c1 - 1)),
             std::stod(s.substr(c2 + 1))};
  if (!(g.step > 0.0) || !(g.max >= g.min))
    throw std::invalid_argument("grid must satisfy max >= min and step > 0");
  return g;
}

std::vector<double> expand_grid(const GridSpec& g) {
  std::vector<double> v;
  for (double x = g.min; x <= g.max + 1e-9 * g.step; x += g.step) v.push_back(x);
  if (v.empty()) throw std::invalid_argument("empty candidate grid");
  return v;
}

void require_file(const std::string& path) {
  if (!fs::exists(path)) throw std::invalid_argument("missing file: " + path);
}

void write_manifest(const std::string& out_dir, const std::string& subcommand,
                    const json& resolved) {
  json m;
  m["tool"] = "wirange";
  m["version"] = tool_version;
  m["subcommand"] = subcommand;
  m["formats"] = {{"spectrogram", 1}, {"result", 1}};
  m["config"] = resolved;
  std::ofstream out(fs::path(out_dir) / "manifest.json");
  out << m.dump(2) << "\n";
}

json load_config(const std::string& path) {
  require_file(path);
  std::ifstream in(path);
  json j;
  in >> j;
  return j;
}

// Everything an estimate-style subcommand needs, resolved from config+flags.
struct EstimateInputs {
  Spectrogram ispec;  // band-sliced intensity spectrogram
  BandPartition part;
  NoiseProfile noise;
  json resolved;
};

EstimateInputs prepare_estimate_inputs(const CommonFlags& f, const json& cfg) {
  EstimateInputs in;
  const std::string stem = cfg.at("spectrogram").get<std::string>();
  require_file(stem + ".json");
  require_file(stem + ".bin");
  Spectrogram spec = read_spectrogram(stem);

  double band_lo, band_hi;
  if (f.band) {
    const auto c = f.band->find(':');
    if (c == std::string::npos) throw std::invalid_argument("band must be FMIN:FMAX");
    band_lo = std::stod(f.band->substr(0, c));
    band_hi = std::stod(f.band->substr(c + 1));
  } else {
    band_lo = cfg.at("band").at(0).get<double>();
    band_hi = cfg.at("band").at(1).get<double>();
  }

  Spectrogram sliced = slice_band(spec, band_lo, band_hi);
  in.ispec = sliced.kind == SpecKind::intensity ? std::move(sliced) : intensity(sliced);

  std::vector<double> tones;
  if (f.tones) tones = parse_list(*f.tones);
  else if (cfg.contains("tones")) tones = cfg["tones"].get<std::vector<double>>();
  else tones = detect_tones(in.ispec, band_lo, band_hi, cfg.value("tone_prominence_db", 6.0));
  const double guard = cfg.value("guard_hz", 0.35);
  in.part = partition_band(in.ispec.freqs, tones, guard);

  const json& nz = cfg.at("noise");
  if (nz.contains("file")) {
    require_file(nz["file"].get<std::string>());
    in.noise = read_noise_profile_json(nz["file"].get<std::string>());
  } else if (nz.contains("quiet_spectrogram")) {
    const std::string qstem = nz["quiet_spectrogram"].get<std::string>();
    require_file(qstem + ".json");
    Spectrogram q = read_spectrogram(qstem);
    Spectrogram qs = slice_band(q, band_lo, band_hi);
    in.noise = noise_profile(qs.kind == SpecKind::intensity ? qs : intensity(qs));
  } else if (nz.contains("variance_per_bin")) {
    in.noise.variance_per_bin = nz["variance_per_bin"].get<std::vector<double>>();
  } else {
    in.noise.variance_per_bin = {nz.at("variance").get<double>()};
  }

  in.resolved = cfg;
  in.resolved["band"] = {band_lo, band_hi};
  in.resolved["tones"] = tones;
  in.resolved["guard_hz"] = guard;
  return in;
}

RateProfile resolve_rate(const CommonFlags& f, const json& cfg) {
  if (f.rate) return RateProfile::constant_rate(*f.rate);
  if (f.rate_profile) {
    require_file(*f.rate_profile);
    const RangeRateProfile p = read_rate_profile(*f.rate_profile);
    return RateProfile::sampled(p.times, p.rates);
  }
  if (cfg.contains("rate_profile_file")) {
    require_file(cfg["rate_profile_file"].get<std::string>());
    const RangeRateProfile p = read_rate_profile(cfg["rate_profile_file"].get<std::string>());
    return RateProfile::sampled(p.times, p.rates);
  }
  if (cfg.contains("rate")) return RateProfile::constant_rate(cfg["rate"].get<double>());
  throw std::invalid_argument("no range rate given (--rate, --rate-profile or config)");
}

GridSpec resolve_grid(const CommonFlags& f, const json& cfg) {
  if (f.grid) return parse_grid(*f.grid);
  if (!cfg.contains("grid")) throw std::invalid_argument("no candidate grid given");
  const json& g = cfg["grid"];
  GridSpec spec{g.at("min").get<double>(), g.at("max").get<double>(), g.at("step").get<double>()};
  if (!(spec.step > 0.0) || !(spec.max >= spec.min))
    throw std::invalid_argument("grid must satisfy max >= min and step > 0");
  return spec;
}

int cmd_simulate(const CommonFlags& f) {
  SimConfig cfg = read_sim_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  fs::create_directories(f.out_dir);
  auto [spec, gt] = synth_spectrogram(cfg);
  write_spectrogram(spec, (fs::path(f.out_dir) / "spectrogram").string());
  write_ground_truth(gt, (fs::path(f.out_dir) / "ground_truth.json").string());
  json resolved = load_config(f.config);
  resolved["seed"] = cfg.seed;
  write_manifest(f.out_dir, "simulate", resolved);
  std::cout << "simulate: " << spec.n_times() << " snapshots x " << spec.n_freqs()
            << " bins, seed " << cfg.seed << "\n";
  return 0;
}

int cmd_estimate(const CommonFlags& f, FreeParam free) {
  const json cfg = load_config(f.config);
  EstimateInputs in = prepare_estimate_inputs(f, cfg);

  MlProblem prob;
  prob.free = free;
  prob.l_min = f.l_min;
  prob.threads = f.threads;
  const GridSpec grid = resolve_grid(f, cfg);
  prob.candidates = expand_grid(grid);
  if (free != FreeParam::rate) prob.fixed_rate = resolve_rate(f, cfg);
  if (free != FreeParam::beta)
    prob.fixed_beta = f.beta ? *f.beta : cfg.at("beta").get<double>();
  if (free != FreeParam::range) prob.fixed_range = cfg.at("range").get<double>();

  const LikelihoodResult res = ml_estimate(in.ispec, in.part, in.noise, prob);

  fs::create_directories(f.out_dir);
  write_likelihood_result(res, (fs::path(f.out_dir) / "result.json").string());
  write_likelihood_csv(res, (fs::path(f.out_dir) / "result.csv").string());
  in.resolved["grid"] = {{"min", grid.min}, {"max", grid.max}, {"step", grid.step}};
  in.resolved["l_min"] = f.l_min;
  in.resolved["free_parameter"] = to_string(free);
  write_manifest(f.out_dir, "estimate-" + to_string(free), in.resolved);
  std::cout << "estimate-" << to_string(free) << ": argmax " << res.argmax_value << " ("
            << res.skipped_candidates << " candidates skipped)\n";
  return 0;
}

int cmd_baseline(const CommonFlags& f) {
  const Method method = method_from_string(f.method);
  const json cfg = load_config(f.config);
  EstimateInputs in = prepare_estimate_inputs(f, cfg);
  fs::create_directories(f.out_dir);

  if (method == Method::S) {
    ParamVector q;
    const GridSpec grid = resolve_grid(f, cfg);
    q.range = 0.5 * (grid.min + grid.max);
    q.rate = resolve_rate(f, cfg);
    q.beta = f.beta ? *f.beta : cfg.at("beta").get<double>();
    const RangeAxis axis = map_time_to_range(in.ispec.times, q);
    const double span = std::abs(axis.ranges.back() - axis.ranges.front());
    const SlopeWindow window = default_slope_window(q.range, span, in.ispec.freqs, q.beta);
    const SlopeResult sr = slope_range(in.ispec, axis, window, q.beta);
    json j;
    j["range_estimate"] = sr.range_estimate;
    j["slope_hz_per_m"] = sr.slope;
    j["peak_snr_db"] = sr.peak_snr_db;
    std::ofstream out(fs::path(f.out_dir) / "result.json");
    out << j.dump(2) << "\n";
    in.resolved["method"] = "S";
    write_manifest(f.out_dir, "baseline", in.resolved);
    std::cout << "baseline S: range " << sr.range_estimate << " m, slope " << sr.slope
              << " Hz/m, peak snr " << sr.peak_snr_db << " dB\n";
    return 0;
  }
  if (method == Method::G) return cmd_estimate(f, FreeParam::range);

  MlProblem prob;
  prob.free = FreeParam::range;
  prob.l_min = f.l_min;
  prob.threads = f.threads;
  const GridSpec grid = resolve_grid(f, cfg);
  prob.candidates = expand_grid(grid);
  prob.fixed_rate = resolve_rate(f, cfg);
  prob.fixed_beta = f.beta ? *f.beta : cfg.at("beta").get<double>();
  const LikelihoodResult res = tonal_only_range(in.ispec, in.part, prob);
  write_likelihood_result(res, (fs::path(f.out_dir) / "result.json").string());
  write_likelihood_csv(res, (fs::path(f.out_dir) / "result.csv").string());
  in.resolved["method"] = "T";
  in.resolved["grid"] = {{"min", grid.min}, {"max", grid.max}, {"step", grid.step}};
  write_manifest(f.out_dir, "baseline", in.resolved);
  std::cout << "baseline T: argmax " << res.argmax_value << "\n";
  return 0;
}

int cmd_sweep(const CommonFlags& f) {
  const json cfg = load_config(f.config);
  TrialSpec spec = read_trial_spec(f.config);
  spec.l_min = f.l_min;
  if (f.beta) spec.beta = *f.beta;
  if (f.rate) spec.rate_mps = *f.rate;
  const Method method = f.method != "G" ? method_from_string(f.method)
                                        : method_from_string(cfg.value("method", "G"));
  const int n_trials = cfg.value("n_trials", 50);
  const std::uint64_t base_seed = f.seed ? *f.seed : cfg.value("base_seed", std::uint64_t{1});
  const int workers = f.threads > 0 ? f.threads : cfg.value("workers", 0);

  const SweepSummary sum = run_sweep(spec, method, base_seed, n_trials, workers);

  fs::create_directories(f.out_dir);
  std::ofstream csv(fs::path(f.out_dir) / "sweep.csv");
  csv << "trial,seed,r_true_m,r_hat_m,signed_pct\n";
  csv.precision(12);
  for (std::size_t i = 0; i < sum.trials.size(); ++i) {
    const auto& t = sum.trials[i];
    csv << i << "," << t.seed << "," << t.r_true << "," << t.r_hat << "," << t.signed_pct << "\n";
  }
  json j;
  j["method"] = to_string(method);
  j["n_trials"] = n_trials;
  j["base_seed"] = base_seed;
  j["rmse_pct"] = sum.rmse_pct;
  j["mean_pct"] = sum.mean_pct;
  j["stdev_pct"] = sum.stdev_pct;
  j["iqr_pct"] = sum.iqr_pct;
  j["within_4pct"] = sum.within_pct(4.0);
  std::ofstream out(fs::path(f.out_dir) / "sweep_summary.json");
  out << j.dump(2) << "\n";
  json resolved = cfg;
  resolved["method"] = to_string(method);
  resolved["base_seed"] = base_seed;
  write_manifest(f.out_dir, "sweep", resolved);
  std::cout << "sweep " << to_string(method) << ": rmse " << sum.rmse_pct << "% mean "
            << sum.mean_pct << "% over " << n_trials << " trials\n";
  return 0;
}

int cmd_ais(const CommonFlags& f, std::string track, double lat, double lon, double dt) {
  if (!f.config.empty()) {
    const json cfg = load_config(f.config);
    track = cfg.value("track_csv", track);
    if (cfg.contains("receiver")) {
      lat = cfg["receiver"].value("lat", lat);
      lon = cfg["receiver"].value("lon", lon);
    }
    dt = cfg.value("dt", dt);
  }
  if (track.empty()) throw std::invalid_argument("ais: no track csv given");
  require_file(track);
  const RangeRateProfile prof = ingest_track(track, {lat, lon}, dt);
  fs::create_directories(f.out_dir);
  write_rate_profile_csv(prof, (fs::path(f.out_dir) / "profile.csv").string());
  write_rate_profile_json(prof, (fs::path(f.out_dir) / "profile.json").string());
  json resolved;
  resolved["track_csv"] = track;
  resolved["receiver"] = {{"lat", lat}, {"lon", lon}};
  resolved["dt"] = dt;
  write_manifest(f.out_dir, "ais", resolved);
  std::cout << "ais: " << prof.times.size() << " samples, range "
            << (prof.ranges.empty() ? 0.0 : prof.ranges.front()) << " -> "
            << (prof.ranges.empty() ? 0.0 : prof.ranges.back()) << " m\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"waveguide-invariant passive ranging toolkit"};
  app.require_subcommand(1);

  CommonFlags f;
  std::string ais_track;
  double ais_lat = 0.0, ais_lon = 0.0, ais_dt = 10.0;

  auto* sim = app.add_subcommand("simulate", "synthesize a spectrogram with ground truth");
  add_common(sim, f, true);
  auto* est_r = app.add_subcommand("estimate-range", "ML range estimation");
  add_common(est_r, f, true);
  auto* est_b = app.add_subcommand("estimate-wi", "ML waveguide-invariant estimation");
  add_common(est_b, f, true);
  auto* est_v = app.add_subcommand("estimate-rate", "ML constant range-rate estimation");
  add_common(est_v, f, true);
  auto* base = app.add_subcommand("baseline", "benchmark methods (S)/(T)");
  add_common(base, f, true);
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo trials across seeds");
  add_common(sweep, f, true);
  auto* ais = app.add_subcommand("ais", "AIS track to range-rate profile");
  add_common(ais, f, false);
  ais->add_option("--track", ais_track, "AIS csv file");
  ais->add_option("--receiver-lat", ais_lat, "receiver latitude (deg)");
  ais->add_option("--receiver-lon", ais_lon, "receiver longitude (deg)");
  ais->add_option("--dt", ais_dt, "resampling interval (s)");

  try {
    app.parse(argc, argv);
    if (sim->parsed()) return cmd_simulate(f);
    if (est_r->parsed()) return cmd_estimate(f, FreeParam::range);
    if (est_b->parsed()) return cmd_estimate(f, FreeParam::beta);
    if (est_v->parsed()) return cmd_estimate(f, FreeParam::rate);
    if (base->parsed()) return cmd_baseline(f);
    if (sweep->parsed()) return cmd_sweep(f);
    if (ais->parsed()) return cmd_ais(f, ais_track, ais_lat, ais_lon, ais_dt);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
