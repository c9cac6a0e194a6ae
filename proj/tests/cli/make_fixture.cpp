// Writes the CSV and config files the command-line tests run against.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "parpmon/io.hpp"
#include "synthetic.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixture DIR\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  for (auto [name, seed] : {std::pair{"SE", 1}, std::pair{"NE", 2}}) {
    auto s = synth::generate(synth::par1(0.6), {1961, 1}, 52 * 12, seed, false, name);
    std::ofstream f(dir / (std::string(name) + ".csv"));
    parpmon::write_series_csv(s, f, true);
  }
  std::ofstream(dir / "gap.csv") << "date,value\n2011-01,100\n2011-03,110\n";
  std::ofstream(dir / "short.csv") << "date,value\n2011-01,100\n2011-02,110\n";
  std::ofstream(dir / "run.cfg") << "data.SE = SE.csv\n"
                                    "data.NE = NE.csv\n"
                                    "span.start = 2010-01\n"
                                    "span.end = 2011-12\n"
                                    "K = 12\n"
                                    "simulation_horizon = 12\n"
                                    "omega = 40\n"
                                    "p_max = 2\n"
                                    "forecasters = official_parpa, seasonal_naive\n"
                                    "output_dir = cfg_out\n";
  return 0;
}
