#include <spdlog/cfg/env.h>

#include "hesn/cli.hpp"

int main(int argc, char** argv) {
    spdlog::cfg::load_env_levels();
    return hesn::cli_dispatch(argc, argv);
}
