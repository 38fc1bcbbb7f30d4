// Regenerates tests/data/golden_weights.btwa and prints the per-tensor
// FNV-1a checksums that the model tests pin. Run from the repo root:
//   g++ -std=c++20 -O2 -Iinclude -Ivendor scripts/gen_golden_weights.cpp -o /tmp/ggw && /tmp/ggw
#include <cstdint>
#include <cstdio>
#include <cstring>

#include <bertdetect/model.hpp>

using namespace bertdetect;

static std::uint64_t fnv1a64(const float* data, std::size_t count) {
    std::uint64_t h = 1469598103934665603ull;
    const auto* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < count * sizeof(float); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

int main() {
    BertConfig c;
    c.num_layers = 2;
    c.hidden_size = 8;
    c.num_heads = 2;
    c.ff_size = 16;
    c.vocab_size = 32;
    c.max_positions = 16;
    const ModelWeights w = init_model(c, /*seed=*/123);
    save_weights(w, "tests/data/golden_weights.btwa");
    std::printf("wrote tests/data/golden_weights.btwa (%zu tensors)\n", w.params.size());
    for (const auto& [name, t] : w.params) {
        std::printf("{\"%s\", 0x%016llxull},\n", name.c_str(),
                    static_cast<unsigned long long>(fnv1a64(t->data.data(), t->numel())));
    }
    return 0;
}
