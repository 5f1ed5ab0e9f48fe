#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "datagen.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate the synthetic PROMISE-style CK-metric benchmark files"};
    std::string out_dir = "data";
    std::uint64_t seed = 1907;
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", seed, "Generator seed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    try {
        const auto paths = faultforge::datagen::write_benchmark(out_dir, seed);
        std::printf("wrote %zu dataset files under %s\n", paths.size(), out_dir.c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
