#include <iostream>

#include "hmpst/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return hmpst::cli::run(args, std::cout, std::cerr);
}
