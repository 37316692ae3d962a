#include <iostream>
#include <string>
#include <vector>

#include "graphmind/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return graphmind::run_cli(std::move(args), std::cout, std::cerr);
}
