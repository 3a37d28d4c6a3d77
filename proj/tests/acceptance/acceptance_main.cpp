// Acceptance suite: one pass/fail line per criterion. Placeholder main until
// the criteria land.
#include <cstdio>

int main() {
    std::puts("acceptance suite not wired yet");
    return 1;
}
