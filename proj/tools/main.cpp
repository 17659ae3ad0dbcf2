#include "sparsegpt/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return sparsegpt::cli::run(argc, argv, std::cout, std::cerr);
}
