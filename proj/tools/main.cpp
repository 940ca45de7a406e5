#include <iostream>

#include "adaptmt/cli.hpp"

int main(int argc, char** argv) { return adaptmt::cli::run(argc, argv, std::cout, std::cerr); }
