#include <iostream>

#include "pgnet/cli.hpp"

int main(int argc, char** argv) { return pgnet::cli::main(argc, argv, std::cout, std::cerr); }
