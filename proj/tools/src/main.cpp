#include <iostream>

#include "snrloss/app/commands.hpp"

int main(int argc, char** argv) { return snrloss::app::run_cli(argc, argv, std::cout, std::cerr); }
