#include "mrta/cli.hpp"

int main(int argc, char** argv) { return mrta::cli::main_entry(argc, argv); }
