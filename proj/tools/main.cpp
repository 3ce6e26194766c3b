#include "cli.hpp"

int main(int argc, char** argv) { return lookupf::cli::dispatch(argc, argv); }
