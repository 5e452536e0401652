#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return effront::cli::run(argc, argv, std::cout, std::cerr); }
