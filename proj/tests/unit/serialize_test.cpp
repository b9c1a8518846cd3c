#include <doctest.h>

#include "splatseg/error.hpp"
#include "splatseg/serialize.hpp"
#include "support.hpp"

using namespace splatseg;

TEST_SUITE("serialize") {

TEST_CASE("flat TOML") {
  const json c = parse_flat_toml(
      "# run settings\n"
      "epochs = 250\n"
      "lr = 5e-3   # inline comment\n"
      "ramp_dtc = false\n"
      "name = \"trial # 3\"\n"
      "rotations = [90, 270]\n"
      "\n");
  CHECK(c["epochs"] == 250);
  CHECK(c["lr"] == 5e-3);
  CHECK(c["ramp_dtc"] == false);
  CHECK(c["name"] == "trial # 3");
  CHECK(c["rotations"].size() == 2);
  CHECK_THROWS_AS(parse_flat_toml("[table]\n"), DataError);
  CHECK_THROWS_AS(parse_flat_toml("epochs 3\n"), DataError);
  CHECK_THROWS_AS(parse_flat_toml("lr = fast\n"), DataError);
  CHECK_THROWS_AS(parse_flat_toml("name = \"open\n"), DataError);
}

TEST_CASE("builders keep defaults for missing keys") {
  const json c = parse_flat_toml("lambda_dtc = 0.3\nepochs = 12\nlr = 0.05\np_rotate = 0.0\n");
  const LossWeights w = loss_weights_from(c);
  CHECK(w.lambda_dtc == 0.3);
  CHECK(w.lambda_m == 0.25);
  const FitOptions o = fit_options_from(c);
  CHECK(o.epochs == 12);
  CHECK(o.adam.lr == 0.05);
  CHECK(o.lsf_lr == 0.1);
  const AugmentationConfig a = augmentation_from(c);
  CHECK(a.p_rotate == 0.0);
  CHECK(a.p_flip_h == 0.5);
  CHECK_THROWS_AS(loss_weights_from(json{{"lambda_m", "big"}}), UsageError);
  CHECK(loss_weights_from(json::object()) == LossWeights{});
}

TEST_CASE("config files by extension or content") {
  const auto dir = testing::scratch_dir("config");
  write_text(dir / "a.toml", "epochs = 7\n");
  write_text(dir / "b.json", "{\"epochs\": 8, \"lambda_l\": 0.1}");
  write_text(dir / "c.cfg", "epochs = 9\n");
  write_text(dir / "d.json", "{\"epochs\": ");
  CHECK(load_config_file(dir / "a.toml")["epochs"] == 7);
  CHECK(fit_options_from(load_config_file(dir / "b.json")).epochs == 8);
  CHECK(loss_weights_from(load_config_file(dir / "b.json")).lambda_l == 0.1);
  CHECK(load_config_file(dir / "c.cfg")["epochs"] == 9);
  CHECK_THROWS_AS(load_config_file(dir / "d.json"), DataError);
  CHECK_THROWS_AS(load_config_file(dir / "missing.toml"), DataError);
}

TEST_CASE("options round trip through JSON") {
  FitOptions o;
  o.epochs = 77;
  o.lsf_clip = 4;
  o.ramp_dtc = false;
  o.adam.weight_decay = 1e-4;
  const FitOptions back = fit_options_from(to_json(o));
  CHECK(back.epochs == 77);
  CHECK(back.lsf_clip == 4);
  CHECK(!back.ramp_dtc);
  CHECK(back.adam.weight_decay == 1e-4);
  LossWeights w;
  w.dtc_sign = 1;
  w.k_sigmoid = 10;
  CHECK(loss_weights_from(to_json(w)) == w);
  AugmentationConfig a;
  a.rotations = {180};
  a.target_size = 0;
  const AugmentationConfig ab = augmentation_from(to_json(a));
  CHECK(ab.rotations == std::vector<int>{180});
  CHECK(ab.target_size == 0);
}

TEST_CASE("splat records") {
  const GaussianSplat s{1.5, -2.25, 3, 4.125, 0.3};
  CHECK(splat_from_json(to_json(s)) == s);
  CHECK(splat_from_csv(splat_to_csv(s)) == s);
  CHECK(splat_from_csv("mu_x,mu_y,s_x,s_y,r\n1.5,-2.25,3,4.125,0.3\n") == s);
  CHECK_THROWS_AS(splat_from_csv("1,2,3\n"), DataError);
  CHECK_THROWS_AS(splat_from_json(json{{"mu_x", 1}}), DataError);
  const auto dir = testing::scratch_dir("splat_io");
  write_text(dir / "s.json", dump(to_json(s)));
  write_text(dir / "s.csv", splat_to_csv(s));
  CHECK(load_splat(dir / "s.json") == s);
  CHECK(load_splat(dir / "s.csv") == s);
}

TEST_CASE("dump is stable and keeps insertion order") {
  const json a = {{"z", 1}, {"a", 0.1}};
  CHECK(dump(a) == "{\n  \"z\": 1,\n  \"a\": 0.1\n}\n");
  const UnitMapping m{-3.5, 9.25};
  const UnitMapping back = unit_mapping_from_json(to_json(m));
  CHECK(back.offset == m.offset);
  CHECK(back.scale == m.scale);
}

}  // TEST_SUITE
