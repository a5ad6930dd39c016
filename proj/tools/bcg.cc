#include <iostream>

#include "bcg/cli.h"

int main(int argc, char** argv) { return bcg::run_cli(argc, argv, std::cout, std::cerr); }
