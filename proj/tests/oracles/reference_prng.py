"""Independent reference for the seeded streams and the values frozen from them.

Prints the constants pinned in test_random.cpp and test_bench.cpp, and writes
the golden instance and placement files into tests/data when given --write.
"""

import json
import sys
from pathlib import Path

MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)


def rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK


class Xoshiro:
    def __init__(self, seed):
        sm = SplitMix64(seed)
        self.s = [sm.next() for _ in range(4)]

    def next(self):
        s = self.s
        result = (rotl((s[1] * 5) & MASK, 7) * 9) & MASK
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        return result

    def below(self, bound):
        threshold = (2**64 - bound) % bound
        while True:
            r = self.next()
            if r >= threshold:
                return r % bound

    def uniform_int(self, lo, hi):
        return lo + self.below(hi - lo + 1)


def sample(items, count, rng):
    items = list(items)
    for k in range(min(count, len(items))):
        pick = k + rng.below(len(items) - k)
        items[k], items[pick] = items[pick], items[k]
    return items[:count]


def cells(mx, my):
    return [(i, j) for i in range(1, mx + 1) for j in range(1, my + 1)]


def instance(mx, my, rho, psi, cr, seed):
    n = int(rho * mx * my + 0.5)
    rng = Xoshiro(seed)
    total = n * (n + 1) // 2
    objects = []
    for l in range(1, n + 1):
        c = float(rng.uniform_int(1, 10))
        objects.append({"id": l, "p": (n + 1 - l) / total, "c_push": c, "c_suction": psi * c})
    return {"m_x": mx, "m_y": my, "c_removal": float(cr), "objects": objects}


def main():
    out = Path(__file__).resolve().parent.parent / "data"
    print("splitmix64(0):", [hex(v) for v in (lambda s: [s.next() for _ in range(3)])(SplitMix64(0))])
    x = Xoshiro(42)
    print("xoshiro(42):", [hex(x.next()) for _ in range(4)])
    x = Xoshiro(7)
    print("below(10) seed 7:", [x.below(10) for _ in range(8)])
    print("derive_seed(1, 2, 3):", hex(1 ^ SplitMix64((2 << 32) ^ 3).next()))
    placements = {}
    for seed in (1, 2, 3):
        placed = sample(cells(3, 3), 4, Xoshiro(seed))
        placements[str(seed)] = [{"id": k + 1, "i": c[0], "j": c[1]} for k, c in enumerate(placed)]
        print("random 3x3 n=4 seed", seed, placed)
    inst = instance(4, 4, 0.5, 1.3, 10, 2024)
    print(json.dumps(inst))
    if "--write" in sys.argv:
        (out / "random_placements_3x3_n4.json").write_text(json.dumps(placements, indent=2) + "\n")
        (out / "instance_4x4_rho05_psi13_cr10_seed2024.json").write_text(json.dumps(inst, indent=2) + "\n")


if __name__ == "__main__":
    main()
