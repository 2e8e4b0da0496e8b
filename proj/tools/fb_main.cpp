#include "commands.hpp"

int main(int argc, char** argv) { return fb::cli::run(argc, argv); }
