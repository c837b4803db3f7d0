// Timing comparison between the OpenMP kernels and their serial references:
// ensemble execution (event-driven and fixed-step) and generator assembly.

#include <chrono>
#include <cstdio>

#include "memkin/commands.hpp"
#include "memkin/master.hpp"
#include "memkin/montecarlo.hpp"

using clock_type = std::chrono::high_resolution_clock;

namespace {

template <class F>
double time_ms(F&& f) {
    auto t0 = clock_type::now();
    f();
    auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-36s serial %9.2f ms   parallel %9.2f ms   speedup %.2fx\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
    using namespace memkin;
    std::printf("threads: %d\n", ensemble_threads());

    {
        Network net = make_parallel(10, Scenario::paper_model(), DriveDC{1.0});
        EnsembleSpec spec;
        spec.network = net;
        spec.scheme = Scheme::EventDriven;
        spec.seed = 7;
        const int trials = 40000;
        double serial = time_ms([&] { run_ensemble_serial(spec, trials); });
        double parallel = time_ms([&] { run_ensemble(spec, trials); });
        report("event-driven parallel-10, 4e4 trials", serial, parallel);
    }
    {
        Network net = make_series(10, Scenario::paper_model(), DriveDC{10.0});
        EnsembleSpec spec;
        spec.network = net;
        spec.scheme = Scheme::FixedStep;
        spec.horizon = 5e-3;
        spec.seed = 7;
        const int trials = 5000;
        double serial = time_ms([&] { run_ensemble_serial(spec, trials); });
        double parallel = time_ms([&] { run_ensemble(spec, trials); });
        report("fixed-step series-10, 5e3 trials", serial, parallel);
    }
    {
        Network net = make_series(12, Scenario::paper_model(), DriveDC{12.0});
        double serial = time_ms([&] { build_generator_serial(net, 0.0); });
        double parallel = time_ms([&] { build_generator(net, 0.0); });
        report("generator assembly, N = 12", serial, parallel);
    }
    return 0;
}
