#include <hiporank/cli.hpp>

int main(int argc, char** argv) { return hiporank::cli::run(argc, argv); }
