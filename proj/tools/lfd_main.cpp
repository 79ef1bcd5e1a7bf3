#include "lfd/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return lfd::cli::main_entry(argc, argv, std::cout, std::cerr);
}
