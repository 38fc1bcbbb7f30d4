// Reads words (one per line) on stdin, prints their Porter stems.
// Used by scripts/crosscheck_porter.sh to compare against porter_ref.py.
#include <iostream>
#include <string>

#include "bertdetect/porter.hpp"

int main() {
    std::ios::sync_with_stdio(false);
    std::string word;
    while (std::getline(std::cin, word)) {
        std::cout << bertdetect::porter_stem(word) << '\n';
    }
    return 0;
}
