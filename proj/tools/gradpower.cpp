#include <iostream>
#include <string>
#include <vector>

#include "gradpower/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return gradpower::cli::run(args, std::cout, std::cerr);
}
