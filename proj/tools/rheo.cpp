// SPDX-License-Identifier: Apache-2.0
#include "rheo/cli.hpp"

int main(int argc, char** argv) { return rheo::cli_main(argc, argv); }
