#include <olw/config.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "support/helpers.hpp"

#include <string>
#include <vector>

using Catch::Matchers::ContainsSubstring;

TEST_CASE("config parses sections, comments, and padding", "[config]") {
  auto cfg = olw::Config::from_string(
      "# preamble\n"
      "top = level\n"
      "\n"
      "[training]\n"
      "  epochs = 30 \r\n"
      "rate=3e-3\n"
      "verbose = Yes\n"
      "[data]\n"
      "path = /tmp/x y.tsv\n",
      "test");

  CHECK(cfg.get_string("top") == "level");
  CHECK(cfg.get_int("training.epochs") == 30);
  CHECK(cfg.get_double("training.rate") == 3e-3);
  CHECK(cfg.get_bool("training.verbose"));
  CHECK(cfg.get_string("data.path") == "/tmp/x y.tsv");
  CHECK(cfg.has("top"));
  CHECK_FALSE(cfg.has("epochs"));  // section prefix is part of the key

  CHECK(cfg.keys() == std::vector<std::string>{"data.path", "top",
                                               "training.epochs", "training.rate",
                                               "training.verbose"});
}

TEST_CASE("typed getters fall back only when the key is absent", "[config]") {
  auto cfg = olw::Config::from_string("present = 5\nflag = off\n", "test");
  CHECK(cfg.get_int("present", 9) == 5);
  CHECK(cfg.get_int("absent", 9) == 9);
  CHECK(cfg.get_double("absent", 0.5) == 0.5);
  CHECK(cfg.get_string("absent", "d") == "d");
  CHECK_FALSE(cfg.get_bool("flag", true));
  CHECK(cfg.get_bool("missing-flag", true));

  REQUIRE_THROWS_WITH(cfg.get_string("absent"),
                      ContainsSubstring("missing config key 'absent'"));
  // A malformed value still throws even when a fallback exists.
  auto bad = olw::Config::from_string("n = five\n", "test");
  REQUIRE_THROWS_WITH(bad.get_int("n", 3), ContainsSubstring("not an integer"));
}

TEST_CASE("value parsing is strict about trailing junk", "[config]") {
  auto cfg = olw::Config::from_string(
      "int_junk = 12x\nnum_junk = 1.5.2\nbool_junk = maybe\nneg = -4\n", "test");
  REQUIRE_THROWS_AS(cfg.get_int("int_junk"), olw::config_error);
  REQUIRE_THROWS_AS(cfg.get_double("num_junk"), olw::config_error);
  REQUIRE_THROWS_AS(cfg.get_bool("bool_junk"), olw::config_error);
  CHECK(cfg.get_int("neg") == -4);

  // Boolean synonyms in both directions.
  auto flags = olw::Config::from_string(
      "a = true\nb = 1\nc = YES\nd = on\ne = false\nf = 0\ng = No\nh = OFF\n",
      "test");
  for (std::string k : {"a", "b", "c", "d"}) CHECK(flags.get_bool(k));
  for (std::string k : {"e", "f", "g", "h"}) CHECK_FALSE(flags.get_bool(k));
}

TEST_CASE("config rejects structural mistakes with line numbers", "[config]") {
  REQUIRE_THROWS_WITH(olw::Config::from_string("a = 1\na = 2\n", "f"),
                      ContainsSubstring("f:2: duplicate key 'a'"));
  REQUIRE_THROWS_WITH(
      olw::Config::from_string("[s]\nk = 1\n[s2]\nk = 1\n[s]\nk = 2\n", "f"),
      ContainsSubstring("duplicate key 's.k'"));
  REQUIRE_THROWS_WITH(olw::Config::from_string("[broken\n", "f"),
                      ContainsSubstring("f:1: malformed section header"));
  REQUIRE_THROWS_WITH(olw::Config::from_string("[ ]\n", "f"),
                      ContainsSubstring("empty section name"));
  REQUIRE_THROWS_WITH(olw::Config::from_string("just words\n", "f"),
                      ContainsSubstring("expected key = value"));
  REQUIRE_THROWS_WITH(olw::Config::from_string(" = 3\n", "f"),
                      ContainsSubstring("empty key"));
}

TEST_CASE("unknown keys are caught against an allow-list", "[config]") {
  auto cfg = olw::Config::from_string("[m]\nunits = 3\ntypo = 4\n", "test");
  REQUIRE_THROWS_WITH(cfg.require_known({"m.units"}),
                      ContainsSubstring("unknown config key 'm.typo'"));
  REQUIRE_NOTHROW(cfg.require_known({"m.units", "m.typo"}));
}

TEST_CASE("config files load like strings and report open failures", "[config]") {
  testutil::TempDir tmp;
  auto path = tmp.file("run.cfg");
  testutil::write_file(path, "[grid]\nname = subtask_a\n");
  auto cfg = olw::Config::from_file(path);
  CHECK(cfg.get_string("grid.name") == "subtask_a");

  REQUIRE_THROWS_WITH(olw::Config::from_file(tmp.file("gone.cfg")),
                      ContainsSubstring("cannot open config file"));
}
