// gime-fixtures — regenerate the deterministic datasets shipped under
// fixtures/. Every output is a pure function of the flags, so committed
// fixtures can be reproduced byte for byte.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gime/fixtures.hpp"
#include "gime/verifier.hpp"

int main(int argc, char** argv) {
  CLI::App app{"regenerate shipped fixture datasets"};
  std::string out_dir = "fixtures";
  std::string which = "all";
  uint64_t civil_records = 10000;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--which", which, "civil | ctr | weather | stress | sweep | all");
  app.add_option("--civil-records", civil_records,
                 "civil pool size (multiple of 10000)");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out_dir);
    if (which == "civil" || which == "all") {
      gime::CivilFixtureOptions options;
      options.records = civil_records;
      gime::write_civil_fixture_files(out_dir, options);
      std::cout << "wrote civil fixture (" << civil_records << " records)\n";
    }
    if (which == "ctr" || which == "all") {
      gime::write_fixture_files(gime::make_ctr_fixture(), out_dir, "ctr");
      std::cout << "wrote ctr fixture\n";
    }
    if (which == "weather" || which == "all") {
      gime::write_fixture_files(gime::make_weather_fixture(), out_dir, "weather");
      std::cout << "wrote weather fixture\n";
    }
    if (which == "stress" || which == "all") {
      gime::write_fixture_files(gime::make_selection_stress_fixture(), out_dir,
                                "stress");
      std::cout << "wrote stress fixture\n";
    }
    if (which == "sweep" || which == "all") {
      gime::SyntheticPoolSpec spec;
      spec.n = 1000;
      spec.seed = 77;
      const auto pool = gime::ValuedPool::generate(spec);
      const auto sweep = gime::generate_sweep(
          pool, gime::MetricId::Volume,
          [](double v) { return 0.5 + v / 10000.0; },
          {100, 200, 300, 400, 500, 600, 700, 800});
      std::ofstream out(std::filesystem::path(out_dir) / "volume_sweep.csv",
                        std::ios::binary);
      out << sweep.to_csv();
      std::cout << "wrote volume sweep\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
