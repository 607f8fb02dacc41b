// Compares the serial reference and the parallel Monte-Carlo Laplace
// estimator; both must produce identical numbers.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "vague/random_measure.hpp"

using namespace vague;

int main(int argc, char** argv) {
  long reps = argc > 1 ? std::atol(argv[1]) : 40000;
  IntensityMeasure intensity(1.0, 1.0);
  RandomMeasureModel model = RandomMeasureModel::poisson(intensity);
  TestFunction f = TestFunction::bump(GroundSpace::halfline_hl(), 3);

  auto time_it = [&](auto&& fn, LaplaceEstimate& out) {
    auto start = std::chrono::steady_clock::now();
    out = fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };
  LaplaceEstimate serial, parallel;
  double ts = time_it([&] { return laplace_mc_serial(model, f, reps, 7); },
                      serial);
  double tp = time_it([&] { return laplace_mc(model, f, reps, 7); }, parallel);
  std::printf("reps %ld\n", reps);
  std::printf("serial   %.3fs  estimate %.10f +- %.3e\n", ts, serial.estimate,
              serial.std_error);
  std::printf("parallel %.3fs  estimate %.10f +- %.3e\n", tp,
              parallel.estimate, parallel.std_error);
  std::printf("speedup %.2fx\n", ts / tp);
  if (serial.estimate != parallel.estimate ||
      serial.std_error != parallel.std_error) {
    std::printf("MISMATCH between serial and parallel results\n");
    return 1;
  }
  std::printf("serial and parallel results are identical\n");
  return 0;
}
