#include "sigkit/cli.hpp"

int main(int argc, char** argv) { return sigkit::cli::run(argc, argv); }
