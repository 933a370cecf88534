#include "pcag/cli.hpp"

int main(int argc, char** argv) { return pcag::cli_dispatch(argc, argv); }
