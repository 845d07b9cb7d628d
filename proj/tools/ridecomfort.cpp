#include <iostream>

#include "ridecomfort/cli.hpp"

int main(int argc, char** argv) { return ridecomfort::run_cli(argc, argv, std::cout, std::cerr); }
