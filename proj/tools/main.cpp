#include <iostream>
#include <string>
#include <vector>

#include "kerrpur/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return kerrpur::run_cli(args, std::cout, std::cerr);
}
