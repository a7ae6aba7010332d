#include "foamrp/cli.hpp"

int main(int argc, char** argv) { return foamrp::cli::dispatch(argc, argv); }
