#include <iostream>

#include "kcoll/cli.hpp"

int main(int argc, char** argv) { return kcoll::cli::main(argc, argv, std::cerr); }
