#include <iostream>
#include <string>
#include <vector>

#include "ablkit/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    return ablkit::cli::run(args, std::cout, std::cerr);
}
