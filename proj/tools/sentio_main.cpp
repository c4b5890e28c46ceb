#include "sentio/cli.hpp"

int main(int argc, char** argv) { return sentio::cli::run(argc, argv); }
