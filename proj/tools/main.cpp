#include <cstdio>

int main() {
    std::puts("nsaug: CLI not wired up yet");
    return 0;
}
