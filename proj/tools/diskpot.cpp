#include <diskpot/cli.hpp>

int main(int argc, char** argv) { return diskpot::cli::run_cli(argc, argv); }
