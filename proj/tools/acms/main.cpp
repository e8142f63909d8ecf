#include <iostream>

#include "acms/harness.hpp"

int main(int argc, char** argv) { return acms::run_cli(argc, argv, std::cout, std::cerr); }
