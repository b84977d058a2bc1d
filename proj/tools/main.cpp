#include "chipletplace/cli.hpp"

int main(int argc, char** argv) { return chiplet::cli_main(argc, argv); }
