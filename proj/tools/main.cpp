#include "commands.hpp"

int main(int argc, char** argv) { return treeaudit::cli::run(argc, argv); }
