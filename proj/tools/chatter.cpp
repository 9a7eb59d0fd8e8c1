#include <chatter/cli.hpp>

int main(int argc, char **argv) { return chatter::cli::run_cli(argc, argv); }
