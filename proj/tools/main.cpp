#include "dlasso/cli.hpp"

int main(int argc, char** argv) { return dlasso::cli::dispatch(argc, argv); }
