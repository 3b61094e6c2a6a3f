#include <iostream>
#include <string>
#include <vector>

#include "vbarrier/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return vbarrier::cli::run(args, std::cout, std::cerr);
}
