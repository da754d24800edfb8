#include <cstdio>

int main() {
    std::puts("chirpsim: CLI not wired yet");
    return 0;
}
