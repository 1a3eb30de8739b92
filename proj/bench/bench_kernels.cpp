// Wall-clock comparison of the serial reference implementations against the
// OpenMP kernels on synthetic data.
//
//   actscan_bench [nodes] [backgrounds] [threads]

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <random>
#include <string>

#include <omp.h>

#include "actscan/activation_store.hpp"
#include "actscan/ltss_scan.hpp"
#include "actscan/pvalue_ranges.hpp"

using namespace actscan;

template <typename F>
double time_ms(F&& f, int reps = 3) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        f();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

int main(int argc, char** argv) {
    const std::size_t nodes = argc > 1 ? std::stoul(argv[1]) : 20000;
    const std::size_t backgrounds = argc > 2 ? std::stoul(argv[2]) : 1000;
    if (argc > 3) omp_set_num_threads(std::stoi(argv[3]));

    std::mt19937_64 rng(7);
    std::normal_distribution<float> normal;
    // quantized tanh values so that ties (and fractional priorities) occur
    auto sample = [&] { return std::round(std::tanh(normal(rng)) * 64.0f) / 64.0f; };

    Matrix bg(backgrounds, nodes);
    for (std::size_t r = 0; r < backgrounds; ++r)
        for (auto& v : bg.row(r)) v = sample();
    std::vector<float> input(nodes);
    for (auto& v : input) v = sample() + 0.1f;

    BackgroundActivations background(bg);
    BackgroundIndex index(background);
    const auto ranges = ranges_for_input(index, input);
    std::vector<std::size_t> all(nodes);
    for (std::size_t i = 0; i < nodes; ++i) all[i] = i;
    ScanConfig config;

    std::cout << "nodes=" << nodes << " backgrounds=" << backgrounds << " threads=" << omp_get_max_threads()
              << " alphas=" << candidate_alphas(ranges, config).size() << "\n";
    std::cout << std::fixed << std::setprecision(2);

    const double build_ms = time_ms([&] { BackgroundIndex again(background); }, 1);
    const double ref_ranges = time_ms([&] { reference::ranges_for_input(background, input); });
    const double omp_ranges = time_ms([&] { ranges_for_input(index, input); });
    const double stream_ranges = time_ms([&] { ranges_streaming(background, input); });
    std::cout << "index build           " << std::setw(10) << build_ms << " ms\n";
    std::cout << "ranges  reference     " << std::setw(10) << ref_ranges << " ms\n";
    std::cout << "ranges  kernel        " << std::setw(10) << omp_ranges << " ms\n";
    std::cout << "ranges  streaming     " << std::setw(10) << stream_ranges << " ms\n";

    ScanResult ref_result, omp_result;
    const double ref_scan = time_ms([&] { ref_result = reference::scan_nodes(ranges, all, config); }, 1);
    const double omp_scan = time_ms([&] { omp_result = scan_nodes(ranges, all, config); });
    std::cout << "scan    reference     " << std::setw(10) << ref_scan << " ms\n";
    std::cout << "scan    kernel        " << std::setw(10) << omp_scan << " ms\n";
    std::cout << std::setprecision(12) << "score reference=" << ref_result.score << " kernel=" << omp_result.score
              << " |S| " << ref_result.n << " / " << omp_result.n << "\n";
    return ref_result.score == omp_result.score ? EXIT_SUCCESS : EXIT_FAILURE;
}
