#include "cli.hpp"

int main(int argc, char** argv) { return mfvdm::cli::main(argc, argv); }
