// Times the Monte Carlo kernel: serial reference loop vs the OpenMP
// replicate loop, and checks the reports agree bit for bit.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pbinfer/simulation.hpp"
#include "pbinfer/table_io.hpp"

using namespace pbinfer;

namespace {

double wall_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

} // namespace

int main(int argc, char** argv) {
    std::size_t n = 2000, n_lab = 300, replicates = 200;
    if (argc > 1) n = std::stoull(argv[1]);
    if (argc > 2) n_lab = std::stoull(argv[2]);
    if (argc > 3) replicates = std::stoull(argv[3]);

    int max_threads = 1;
#ifdef _OPENMP
    max_threads = omp_get_max_threads();
#endif

    std::printf("%-28s %10s %10s %8s %6s\n", "scenario", "serial_s", "parallel_s", "speedup",
                "match");
    for (Family fam : {Family::linear, Family::logistic}) {
        SimScenario sc;
        sc.family = fam;
        sc.error_type = ErrorType::random_error;
        sc.quality = Quality::high;
        sc.n = n;
        sc.n_lab = n_lab;
        sc.replicates = replicates;
        sc.seed = 7;
        std::vector<Method> methods = default_methods(fam);

        reference_beta_star(fam); // warm the cache outside the timers

        double t0 = wall_seconds();
        SimReport serial = run_scenario(sc, methods, 1);
        double t1 = wall_seconds();
        SimReport parallel = run_scenario(sc, methods, max_threads);
        double t2 = wall_seconds();

        bool match = sim_report_csv({serial}) == sim_report_csv({parallel});
        std::printf("%-28s %10.3f %10.3f %8.2f %6s\n", scenario_id(sc).c_str(), t1 - t0, t2 - t1,
                    (t1 - t0) / std::max(1e-9, t2 - t1), match ? "yes" : "NO");
        if (!match) return 1;
    }
    return 0;
}
