#include <iostream>

#include "anisobound/cli.hpp"

int main(int argc, char** argv) { return anisobound::cli::run_cli(argc, argv, std::cout, std::cerr); }
