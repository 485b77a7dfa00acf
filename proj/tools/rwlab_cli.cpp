#include "rwlab/cli.hpp"

int main(int argc, char** argv) { return rwlab::cli_dispatch(argc, argv); }
