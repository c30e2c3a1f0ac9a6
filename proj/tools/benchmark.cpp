// Wall-clock comparison of sequential and pooled scenario dispatch over a
// batch of independent runs. Both paths must produce byte-identical output;
// the pooled path only reorders who computes what.
//
//   wtrom_bench [batch_size] [t_end_s]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "wtrom/harness.hpp"
#include "wtrom/scenario.hpp"

namespace h = wtrom::harness;

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 16;
    const double t_end = argc > 2 ? std::atof(argv[2]) : 1.0;
    if (n < 1 || t_end <= 0.0) {
        std::fprintf(stderr, "usage: wtrom_bench [batch_size >= 1] [t_end_s > 0]\n");
        return 1;
    }

    auto base = h::load_scenario(std::string(WTROM_SCENARIO_DIR) + "/slg_rated.scn");
    base.t_end_s = t_end;
    h::validate_scenario(base);

    // spread the fault impedance so the batch is not one memoizable case
    std::vector<h::Scenario> batch;
    for (int i = 0; i < n; ++i) {
        h::Scenario s = base;
        h::apply_parameter(s, "fault.zf_pu", 0.01 + 0.002 * i);
        batch.push_back(std::move(s));
    }

    (void)h::run(batch[0], h::Model::BOTH);  // touch code and data once

    using Clock = std::chrono::steady_clock;
    auto timed = [&](bool parallel) {
        const auto t0 = Clock::now();
        auto out = h::run_batch(batch, h::Model::BOTH, parallel);
        const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
        return std::pair{std::move(out), dt};
    };

    auto [serial_out, serial_s] = timed(false);
    auto [pooled_out, pooled_s] = timed(true);

    bool identical = true;
    for (int i = 0; i < n && identical; ++i)
        identical = h::format_trajectory_csv(serial_out[i].rom) ==
                        h::format_trajectory_csv(pooled_out[i].rom) &&
                    h::format_trajectory_csv(serial_out[i].refmodel) ==
                        h::format_trajectory_csv(pooled_out[i].refmodel);

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif

    std::printf("batch of %d scenarios, horizon %.3g s, %d thread(s)\n", n, t_end, threads);
    std::printf("  sequential  %8.3f s\n", serial_s);
    std::printf("  pooled      %8.3f s\n", pooled_s);
    std::printf("  speedup     %8.2fx\n", serial_s / pooled_s);
    std::printf("  outputs     %s\n", identical ? "byte-identical" : "MISMATCH");
    return identical ? 0 : 1;
}
