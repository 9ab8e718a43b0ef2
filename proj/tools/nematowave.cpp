#include "nematowave/cli.hpp"

int main(int argc, char** argv) { return nematowave::run_cli(argc, argv); }
