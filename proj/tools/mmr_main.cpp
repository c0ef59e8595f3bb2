#include <iostream>

#include "mmregret/cli/app.hpp"

int main(int argc, char** argv) { return mmr::cli::run(argc, argv, std::cout, std::cerr); }
