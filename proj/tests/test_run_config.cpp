#include "doctest.h"
#include "run_config.hpp"
#include "support.hpp"

using wplus::cli::ConfigError;
using wplus::cli::RunConfig;

TEST_CASE("defaults match the library") {
  const RunConfig c;
  CHECK(c.get("init") == "mean");
  CHECK(c.get("space") == "wplus");
  CHECK(c.get_u64("steps") == 5000);
  CHECK(c.get_double("lr") == 0.01);
  CHECK(c.get_double("beta1") == 0.9);
  CHECK(c.get_double("beta2") == 0.999);
  CHECK(c.get_double("epsilon") == 1e-8);
  CHECK(c.get_u64("loss_resolution") == 256);
  CHECK(c.get_u64("mean_samples") == 10000);
  CHECK(c.get_u64("rounds") == 7);
  CHECK_THROWS_AS(c.get("no_such_key"), ConfigError);
}

TEST_CASE("later layers win") {
  // Defaults < file < flags, key by key.
  RunConfig c;
  c.load_text("steps = 300\nlr = 0.05  # tuned\n\n# comment only\nseed=4\n");
  c.set("seed", "9");
  CHECK(c.get_u64("steps") == 300);
  CHECK(c.get_double("lr") == 0.05);
  CHECK(c.get_u64("seed") == 9);
  CHECK(c.get_double("beta1") == 0.9);

  const auto dir = testing::scratch_dir("run_config");
  {
    std::ofstream f(dir / "run.cfg");
    f << "record_every = 25\nspace = w\n";
  }
  c.load_file(dir / "run.cfg");
  CHECK(c.get_u64("record_every") == 25);
  CHECK(c.get("space") == "w");
  CHECK_THROWS_AS(c.load_file(dir / "missing.cfg"), ConfigError);
}

TEST_CASE("unknown keys and bad syntax are rejected with their location") {
  RunConfig c;
  try {
    c.load_text("steps = 3\nstepz = 4\n", "run.cfg");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("run.cfg:2") != std::string::npos);
    CHECK(std::string(e.what()).find("stepz") != std::string::npos);
  }
  CHECK_THROWS_AS(c.load_text("just words\n"), ConfigError);
  CHECK_THROWS_AS(c.set("learning_rate", "0.1"), ConfigError);
}

TEST_CASE("strict number parsing") {
  using wplus::cli::parse_double;
  using wplus::cli::parse_u64;
  CHECK(parse_u64("42", "n") == 42);
  CHECK(parse_double("2.5e-3", "x") == 2.5e-3);
  CHECK(parse_double("-1", "x") == -1.0);
  for (const char* bad : {"", "-1", "12abc", "1.5", " 7", "99999999999999999999999"})
    CHECK_THROWS_AS(parse_u64(bad, "n"), ConfigError);
  for (const char* bad : {"", "abc", "1.0x", "nan", "inf", "1e999", " 1"})
    CHECK_THROWS_AS(parse_double(bad, "x"), ConfigError);

  RunConfig c;
  c.set("steps", "ten");
  CHECK_THROWS_AS(c.get_u64("steps"), ConfigError);
  c.set("seed", "true");
  CHECK(c.get_bool("seed"));
  c.set("seed", "0");
  CHECK_FALSE(c.get_bool("seed"));
  c.set("seed", "maybe");
  CHECK_THROWS_AS(c.get_bool("seed"), ConfigError);
}
