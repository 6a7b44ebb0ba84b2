#include "ehrelay/cli.hpp"

int main(int argc, char** argv) { return ehrelay::run_cli(argc, argv); }
