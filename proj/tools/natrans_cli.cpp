#include "natrans/cli.hpp"

int main(int argc, char **argv) { return natrans::cli::main_entry(argc, argv); }
