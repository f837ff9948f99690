// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "hosgns/cli.hpp"

int main(int argc, char** argv) { return hosgns::run_cli(argc, argv, std::cout, std::cerr); }
