#include <iostream>

#include "hcflow/cli.hpp"

int main(int argc, char** argv) { return hcflow::runCli(argc, argv, std::cout, std::cerr); }
