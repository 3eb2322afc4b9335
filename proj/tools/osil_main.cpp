#include <cstdio>

int main(int argc, char** argv) {
    (void)argc;
    (void)argv;
    std::fprintf(stderr, "osil: command-line interface not wired up yet\n");
    return 2;
}
