#include "wzlab/cli.hpp"

int main(int argc, char** argv) { return wzlab::cli::run(argc, argv); }
