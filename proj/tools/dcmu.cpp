#include "dcmu/cli.hpp"

int main(int argc, char** argv) { return dcmu::cli_main(argc, argv); }
