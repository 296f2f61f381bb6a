#include "merlion/config_file.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

using namespace merlion;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("merlion_cfg_" + std::to_string(rd()) + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("sampler config round-trips through its file form") {
  TempDir dir;
  SamplerConfig config;
  config.capacity = 9;
  config.tau_ss = 55.5;
  config.tau_ses = 72.25;
  config.softmax_scale = 80.0;
  config.metric = Metric::cosine;
  config.transform = Transform::l2;
  config.seed_policy = SeedPolicy::raw_index;
  config.srum_weight = 0.25;
  config.rep_window_seconds = 12.0;

  write_sampler_config(config, dir.file("c.cfg"));
  const SamplerConfig back = read_sampler_config(dir.file("c.cfg"));
  CHECK(back.capacity == config.capacity);
  CHECK(back.tau_ss == config.tau_ss);
  CHECK(back.tau_ses == config.tau_ses);
  CHECK(back.softmax_scale == config.softmax_scale);
  CHECK(back.metric == config.metric);
  CHECK(back.transform == config.transform);
  CHECK(back.seed_policy == config.seed_policy);
  CHECK(back.srum_weight == config.srum_weight);
  CHECK(back.rep_window_seconds == config.rep_window_seconds);
}

TEST_CASE("synth spec round-trips through its file form") {
  TempDir dir;
  SynthSpec spec;
  spec.seed = 12345;
  spec.dim = 24;
  spec.n_frames = 300;
  spec.n_relevant = 4;
  spec.n_listed = 2;
  spec.n_unlisted = 3;
  spec.noise_sigma = 0.15;
  spec.murk_level = 0.625;
  spec.theme_weight = 0.5;
  spec.murk_theme_cos = 0.4;
  spec.unlisted_listed_cos = 0.35;
  spec.max_pairwise_cos = 0.65;
  spec.n_humans = 5;
  spec.jitter_frames = 2;
  spec.fps = 10.0;

  write_synth_spec(spec, dir.file("s.cfg"));
  const SynthSpec back = read_synth_spec(dir.file("s.cfg"));
  CHECK(back.seed == spec.seed);
  CHECK(back.dim == spec.dim);
  CHECK(back.n_frames == spec.n_frames);
  CHECK(back.n_relevant == spec.n_relevant);
  CHECK(back.n_listed == spec.n_listed);
  CHECK(back.n_unlisted == spec.n_unlisted);
  CHECK(back.noise_sigma == spec.noise_sigma);
  CHECK(back.murk_level == spec.murk_level);
  CHECK(back.theme_weight == spec.theme_weight);
  CHECK(back.murk_theme_cos == spec.murk_theme_cos);
  CHECK(back.unlisted_listed_cos == spec.unlisted_listed_cos);
  CHECK(back.max_pairwise_cos == spec.max_pairwise_cos);
  CHECK(back.n_humans == spec.n_humans);
  CHECK(back.jitter_frames == spec.jitter_frames);
  CHECK(back.fps == spec.fps);
}

TEST_CASE("parser tolerates comments, blanks, and spacing; last assignment wins") {
  TempDir dir;
  spit(dir.file("c.cfg"),
       "# sampler settings\n"
       "\n"
       "  capacity=4   # inline comment\n"
       "tau_ss =  60\n"
       "capacity = 7\n");
  const SamplerConfig c = read_sampler_config(dir.file("c.cfg"));
  CHECK(c.capacity == 7);
  CHECK(c.tau_ss == 60.0);
  CHECK(c.tau_ses == 70.0);  // untouched keys keep their defaults
}

TEST_CASE("parser errors carry the offending line or key") {
  TempDir dir;
  SUBCASE("missing file") {
    CHECK_THROWS(read_sampler_config(dir.file("absent.cfg")));
  }
  SUBCASE("line without an equals sign") {
    spit(dir.file("bad.cfg"), "capacity = 4\njust some words\n");
    CHECK_THROWS_WITH_AS(read_sampler_config(dir.file("bad.cfg")), doctest::Contains("line 2"),
                         std::runtime_error);
  }
  SUBCASE("unknown key") {
    spit(dir.file("bad.cfg"), "capacityy = 4\n");
    CHECK_THROWS_WITH_AS(read_sampler_config(dir.file("bad.cfg")),
                         doctest::Contains("capacityy"), std::invalid_argument);
  }
  SUBCASE("non-numeric value") {
    spit(dir.file("bad.cfg"), "tau_ss = often\n");
    CHECK_THROWS(read_sampler_config(dir.file("bad.cfg")));
  }
  SUBCASE("trailing junk after a number") {
    spit(dir.file("bad.cfg"), "tau_ss = 40banana\n");
    CHECK_THROWS(read_sampler_config(dir.file("bad.cfg")));
  }
  SUBCASE("out-of-range values") {
    spit(dir.file("bad.cfg"), "tau_ss = 140\n");
    CHECK_THROWS_AS(read_sampler_config(dir.file("bad.cfg")), std::invalid_argument);
    spit(dir.file("bad2.cfg"), "capacity = 0\n");
    CHECK_THROWS_AS(read_sampler_config(dir.file("bad2.cfg")), std::invalid_argument);
    spit(dir.file("bad3.cfg"), "srum_weight = 1.5\n");
    CHECK_THROWS_AS(read_sampler_config(dir.file("bad3.cfg")), std::invalid_argument);
  }
  SUBCASE("unknown enum value") {
    spit(dir.file("bad.cfg"), "metric = manhattanish\n");
    CHECK_THROWS_WITH_AS(read_sampler_config(dir.file("bad.cfg")), doctest::Contains("unknown"),
                         std::invalid_argument);
  }
}

TEST_CASE("enum names round-trip") {
  for (Metric m : {Metric::euclidean, Metric::cosine, Metric::l1}) {
    CHECK(metric_from_string(to_string(m)) == m);
  }
  for (Transform t : {Transform::l1, Transform::l2}) {
    CHECK(transform_from_string(to_string(t)) == t);
  }
  for (SeedPolicy p : {SeedPolicy::gated_count, SeedPolicy::raw_index}) {
    CHECK(seed_policy_from_string(to_string(p)) == p);
  }
  CHECK_THROWS_AS(metric_from_string("chebyshev"), std::invalid_argument);
  CHECK_THROWS_AS(transform_from_string("l3"), std::invalid_argument);
  CHECK_THROWS_AS(seed_policy_from_string("eager"), std::invalid_argument);
}

TEST_CASE("the shipped visibility regimes parse to the documented thresholds") {
  // repository configs: clear 70, moderate 50, low 40
  const std::filesystem::path configs = MERLION_CONFIG_DIR;
  const SamplerConfig clear = read_sampler_config((configs / "clear_visibility.cfg").string());
  const SamplerConfig moderate =
      read_sampler_config((configs / "moderate_visibility.cfg").string());
  const SamplerConfig low = read_sampler_config((configs / "low_visibility.cfg").string());
  CHECK(clear.tau_ss == 70.0);
  CHECK(moderate.tau_ss == 50.0);
  CHECK(low.tau_ss == 40.0);
  CHECK(clear.capacity == 6);
  CHECK(moderate.capacity == 6);
  CHECK(low.capacity == 6);
}
