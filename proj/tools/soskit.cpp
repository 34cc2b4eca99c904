#include <iostream>

#include "soskit/cli.hpp"

int main(int argc, char** argv) { return soskit::cli::run(argc, argv, std::cout, std::cerr); }
