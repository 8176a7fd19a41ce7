#include "ltcn/cli.hpp"

int main(int argc, char** argv) { return ltcn::run_cli(argc, argv); }
