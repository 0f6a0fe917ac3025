#include "adquad/cli.hpp"

int main(int argc, char** argv) { return adquad::run_cli(argc, argv); }
