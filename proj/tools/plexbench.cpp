#include <iostream>

#include "plex/cli.hpp"

int main(int argc, char** argv) { return plex::run_cli(argc, argv, std::cout, std::cerr); }
