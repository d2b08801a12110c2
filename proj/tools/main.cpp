#include "flagf/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return flagf::cli::run(argc, argv, std::cout, std::cerr);
}
