#include "cli.hpp"

int main(int argc, char** argv) { return cbf_surrogate::cli::run(argc, argv); }
