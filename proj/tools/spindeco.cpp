#include "commands.hpp"

int main(int argc, char** argv) { return spindeco::cli::run(argc, argv); }
