#include <filesystem>

#include <gtest/gtest.h>

#include "wgf/io.hpp"

using namespace wgf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("wgf_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Format, SeventeenSignificantDigitsRoundTrip) {
  EXPECT_EQ(io::format_double(0.5), "0.5");
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(io::format_double(-2.0), "-2");
  for (double v : {1.0 / 3.0, 6.02214076e23, -1e-300, 123456.789}) EXPECT_EQ(io::parse_double(io::format_double(v)), v);
  EXPECT_THROW(io::parse_double("1.5x"), InputError);
  EXPECT_THROW(io::parse_double(""), InputError);
}

TEST(InverseCdfCsv, RoundTrip) {
  const fs::path dir = scratch("icdf");
  const InverseCDF X = InverseCDF::from_function(17, [](double z) { return std::exp(z) - 1.0 / 3.0; });
  io::write_inverse_cdf(dir / "x.csv", X);
  const InverseCDF Y = io::read_inverse_cdf(dir / "x.csv");
  EXPECT_EQ(X.vector(), Y.vector());
  EXPECT_EQ(io::read_text(dir / "x.csv").substr(0, 4), "z,x\n");
}

TEST(InverseCdfCsv, RejectsMalformedFiles) {
  const fs::path dir = scratch("bad");
  io::write_text(dir / "a.csv", "x,z\n0.5,1\n");
  EXPECT_THROW(io::read_inverse_cdf(dir / "a.csv"), InputError);
  io::write_text(dir / "b.csv", "z,x\n0.25,1\n0.75\n");
  EXPECT_THROW(io::read_inverse_cdf(dir / "b.csv"), InputError);
  io::write_text(dir / "c.csv", "z,x\n0.3,1\n0.75,2\n");
  EXPECT_THROW(io::read_inverse_cdf(dir / "c.csv"), InputError);
  io::write_text(dir / "d.csv", "z,x\n0.25,2\n0.75,1\n");
  EXPECT_THROW(io::read_inverse_cdf(dir / "d.csv"), StateError);
  EXPECT_THROW(io::read_inverse_cdf(dir / "missing.csv"), IoError);
}

TEST(ProfileJson, Forms) {
  const ReferenceProfile a = io::profile_from_json(io::json::parse(R"({"breakpoints":[0,1,1.5],"densities":[1,3]})"));
  EXPECT_DOUBLE_EQ(a.mass(), 2.5);
  const ReferenceProfile b = io::profile_from_json(io::json::parse(R"({"uniform":[0,2],"mass":0.5})"));
  EXPECT_DOUBLE_EQ(b.density_bound(), 0.25);
  EXPECT_THROW(io::profile_from_json(io::json::parse(R"({"breakpoints":[0,1]})")), InputError);
  EXPECT_EQ(io::profile_from_json(io::profile_to_json(a)).mass(), a.mass());
}

TEST(EnergyCsv, RoundTripWithOptionalColumn) {
  const fs::path dir = scratch("energy");
  std::vector<EnergyReport> r(2);
  r[0] = {0.0, 1.25, 0.5, std::nullopt, 2.0, 1.0, 0.5};
  r[1] = {0.1, 1.2, 0.25, 0.75, 1.5, 0.9, 0.5};
  io::write_energy(dir / "energy.csv", r);
  const std::string text = io::read_text(dir / "energy.csv");
  EXPECT_EQ(text, "t,E,D,E_hat,moment_qa,moment_r\n0,1.25,0.5,,2,1\n0.10000000000000001,1.2,0.25,0.75,1.5,0.90000000000000002\n");
  const auto back = io::read_energy(dir / "energy.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_FALSE(back[0].E_hat);
  EXPECT_EQ(*back[1].E_hat, 0.75);
  EXPECT_EQ(back[1].t, 0.1);
}

TEST(TrajectoryWriter, WritesIndexAndSnapshots) {
  const fs::path dir = scratch("traj");
  io::TrajectoryWriter w(dir / "trajectory");
  w.add(FlowState{0.0, InverseCDF::uniform(0, 1, 4), 1.0, {}});
  w.add(FlowState{0.5, InverseCDF::uniform(0, 2, 4), 2.0, {}});
  w.finish();
  EXPECT_TRUE(fs::exists(dir / "trajectory" / "snap_000001.csv"));
  const io::json idx = io::read_json(dir / "trajectory" / "index.json");
  EXPECT_EQ(idx["files"][1], "snap_000001.csv");
  EXPECT_EQ(idx["times"][1], 0.5);
}

TEST(SteadySidecar, WritesKindAndLevels) {
  const fs::path dir = scratch("steady");
  const SteadyState s = steady_qr1(ReferenceProfile::uniform(0.0, 1.0, 2.0), 1.0, 8);
  io::write_steady(dir, s);
  const io::json side = io::read_json(dir / "steady.json");
  EXPECT_EQ(side["kind"], "qa_eq_1_shift");
  EXPECT_EQ(side["x_lo"], 0.25);
  EXPECT_EQ(side["x_hi"], 0.75);
  EXPECT_EQ(io::read_inverse_cdf(dir / "steady.csv").size(), 8u);
  const SteadyState none = steady_qr1(ReferenceProfile::uniform(0.0, 1.0, 0.5), 1.0, 8);
  io::write_steady(dir / "none", none);
  EXPECT_TRUE(io::read_json(dir / "none" / "steady.json")["x_lo"].is_null());
}
