#include "commands.hpp"

int main(int argc, char** argv)
{
    return ccsketch::cli::run(argc, argv);
}
