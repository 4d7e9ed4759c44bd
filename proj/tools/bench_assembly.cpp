// Timing comparison of the OpenMP assembly kernels against the serial
// reference path, over a few mesh/degree sizes.

#include <chrono>
#include <cstdio>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "meevc/assembly.hpp"

using namespace meevc;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) fn();
  auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (no OpenMP)\n");
#endif
  std::printf("%-28s %10s %10s %8s\n", "kernel", "omp [ms]", "serial", "speedup");

  struct Case {
    int k, n;
  };
  for (Case c : {Case{12, 2}, Case{24, 3}, Case{32, 4}}) {
    MeshConfig mc;
    mc.elements_per_side = c.k;
    mc.deformation = 0.25;
    mc.periodic = {true, true};
    Mesh mesh(mc);
    FunctionSpace d(mesh, c.n, SpaceKind::D);
    FunctionSpace cs(mesh, c.n, SpaceKind::C);
    auto quad = assembly::default_quad(c.n);

    Field omega = assembly::project(
        cs, ScalarFn([](double x, double y) { return std::sin(6.28 * x) * std::cos(6.28 * y); }),
        quad);

    const int reps = 3;
    double par_mass = time_ms([&] { assembly::mass_matrix(d, quad); }, reps);
    double ser_mass = time_ms([&] { assembly::ref::mass_matrix(d, quad); }, reps);
    char label[64];
    std::snprintf(label, sizeof label, "mass_d K=%d N=%d", c.k, c.n);
    std::printf("%-28s %10.2f %10.2f %7.2fx\n", label, par_mass, ser_mass, ser_mass / par_mass);

    double par_conv = time_ms([&] { assembly::convection_matrix(omega, d, quad); }, reps);
    double ser_conv = time_ms([&] { assembly::ref::convection_matrix(omega, d, quad); }, reps);
    std::snprintf(label, sizeof label, "convection K=%d N=%d", c.k, c.n);
    std::printf("%-28s %10.2f %10.2f %7.2fx\n", label, par_conv, ser_conv, ser_conv / par_conv);
  }
  return 0;
}
